"""Equivalence, canonical forms and exhaustive classification of S4-partitions."""

from .canonical import Canonical, are_equivalent, canonical, canonical_form, canonical_set, invariants
from .equivalence import Equivalence, apply, group_order
from .search import (Census, ClassReport, search_multifold, search_s4, semilinear_classes)
