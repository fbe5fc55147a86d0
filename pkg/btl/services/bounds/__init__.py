from btl.services.bounds.base import BaseBound
from btl.services.bounds.base_bounds import BaseLowerBound, BaseUpperBound
from btl.services.bounds.steklov_product import SteklovProductBound, SteklovConstantTrial
from btl.services.bounds.convex_lower import ConvexLowerBound
from btl.services.bounds.moment_upper import MomentUpperBound, PerimeterInradiusBound
from btl.services.bounds.proximal_upper import ProximalUpperBound, EnhancedProximalUpperBound
from btl.services.bounds.four_quantity import FourQuantityInequality
from btl.services.bounds.conformal_lower import ConformalLowerBound, AreaDistortionBound
from btl.services.bounds.geometric import ParallelPerimeterBound
