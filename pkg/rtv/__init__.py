"""
RTV - robust multi-view triangulation

Agreement-weighted DLT triangulation with WSS joint rejection, the self-supervised
triangulation loss and its gradients, 2.5D lifting, pose metrics and the seeded
simulations that exercise them.
"""

__version__ = "0.1.0"
