from .routes import poles_router, pseudonorm_router, grid_router, trajectory_router
from .services import pole_service, pseudonorm_service, grid_service, trajectory_service

__all__ = [
    'poles_router', 'pseudonorm_router', 'grid_router', 'trajectory_router',
    'pole_service', 'pseudonorm_service', 'grid_service', 'trajectory_service'
]
