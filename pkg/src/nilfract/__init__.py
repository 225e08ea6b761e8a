"""Finite shadows of nilpotent types: f.g. abelian groups over localized
integers, finite nilpotent groups, actions with nilpotent structures,
localization away from a set of naturals and fracture squares."""
from .arith import LocalizedRing, NumSet, ZZ
from .abelian import AbelianHom, AbelianSubgroup, FgAbelianGroup
from .finite_groups import FiniteGroup, FiniteHom, Subgroup
from .actions import EpiTower, GroupAction, NilpotentStructure
from .localization import localize_abelian, localize_finite_nilpotent, localize_group
from .fracture import FractureFamilies, fracture_square_abelian, mult_square_pullback
from .postnikov import Level, PostnikovData

__version__ = "0.1.0"
