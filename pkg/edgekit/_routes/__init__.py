"""Monte Carlo routes: each turns a random stream into one draw of edge statistics.

Submodules are imported directly (``edgekit._routes.sao`` and so on) so that
``edgekit.riccati`` can use the draw runner in ``edgekit._routes.base``.
"""
