"""
Core Modules

Numerical heart of Loccsmith.
These modules are REQUIRED for Loccsmith to work.

Core modules handle:
- Dense matrix kernel and Schmidt decompositions (algebra_module)
- Finite groups and factor systems (group_module)
- Projective representations and irrep sets (representation_module)
- Group Fourier transform and B blocks (fourier_module)
- Group, controlled and double forms of bipartite unitaries (unitary_module)
- Protocol construction and branch simulation (protocol_module)
- Built-in worked examples (catalog_module)
- Settings/configuration (settings_module)

Core modules can use other core modules but CANNOT use integrations.
"""

from .settings_module import SettingsModule, settings_module
from .algebra_module import AlgebraModule, algebra_module
from .group_module import GroupModule, group_module
from .representation_module import RepresentationModule, representation_module
from .fourier_module import FourierModule, fourier_module
from .unitary_module import UnitaryModule, unitary_module
from .protocol_module import ProtocolModule, protocol_module
from .catalog_module import CatalogModule, catalog_module

__all__ = [
    'SettingsModule', 'settings_module',
    'AlgebraModule', 'algebra_module',
    'GroupModule', 'group_module',
    'RepresentationModule', 'representation_module',
    'FourierModule', 'fourier_module',
    'UnitaryModule', 'unitary_module',
    'ProtocolModule', 'protocol_module',
    'CatalogModule', 'catalog_module',
]
