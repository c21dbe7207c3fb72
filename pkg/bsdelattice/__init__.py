"""bsdelattice: nonlinear derivative pricing on binomial lattices."""
from bsdelattice.logutil import get_logger


logger = get_logger(__name__)
