"""Laser Doppler holography blood-flow processing.

Reconstructs complex hologram stacks from off-axis interferograms, computes
short-time Doppler power spectra with SVD clutter rejection, integrates them
into band power Doppler movies (including the reverse-contrast low-frequency
variant used at low frame rates), and ships a synthetic dynamic-speckle
generator whose ground truth makes every processing claim testable.
"""

from .core import (
    Band,
    FrameStack,
    HologramStack,
    PowerDopplerMovie,
    RoiMask,
    SpectralCube,
    StackMeta,
    band_bins,
    bin_frequencies,
    read_stack,
    write_stack,
)
from .reconstruct import (
    CarrierSpec,
    angular_spectrum_propagate,
    demodulate_offaxis,
    reconstruct_stack,
)
from .stft import StftPlan, dpsd, make_windows
from .svdfilter import SvdFilterSpec, cutoff_to_rank, svd_clutter_filter
from .doppler import (
    Spectrogram,
    TracePair,
    baseline_subtract,
    cov_map,
    flat_field,
    normalize_trace_pair,
    power_doppler,
    reverse_contrast,
    roi_trace,
    spectrogram,
    write_trace_csv,
)
from .composite import (
    RenderSpec,
    compose_low_high,
    read_image,
    to_grayscale,
    write_image_sequence,
)
from .simulator import (
    BulkMotionSpec,
    GroundTruth,
    RegionParams,
    SceneSpec,
    cardiac_waveform,
    default_scene,
    gen_field_stack,
    integrate_decimate,
    render_interferograms,
)

__version__ = "0.1.0"
