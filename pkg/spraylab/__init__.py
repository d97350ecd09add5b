from importlib.metadata import PackageNotFoundError, version

from spraylab.catalog import catalog, factor_catalog, metric_from_file, factor_from_file
from spraylab.checks import bianchi_check, cc_check, identity_check, scalar_flag_check
from spraylab.finsler import flat_spray, geodesic_spray
from spraylab.projective import beltrami_check, deform_spray, hamel_check, projective_invariants_check

try:
    __version__ = version('spraylab')
except PackageNotFoundError:
    __version__ = '0.0.0'
