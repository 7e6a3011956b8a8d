"""Cooperative transmission from energy-harvesting transmitters in PPP networks.

``specfun``, ``energy`` and ``geometry`` hold the building blocks,
``analytic`` the closed-form success probabilities, ``mcsim`` the Monte
Carlo oracle and ``cli`` the experiment harness.
"""

__version__ = "0.1.0"
