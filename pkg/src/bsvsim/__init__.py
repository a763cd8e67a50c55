"""Multi-photon interference of twin beams, Fock states and classical light on a beam splitter."""
from ._accel import NUMBA_AVAILABLE, backend
from .classical import ClassicalSourceSpec, arcsine_density_reference, classical_interference_samples
from .detection import (DeltaHistogram, JointCountDistribution, delta_histogram, joint_distribution,
                        noise_reduction_factor, povm_joint_probability)
from .errors import DomainError, FitError, ResourceLimitError
from .filtering import MacroAmplitudes, effective_overlap, filter_condition, macro_joint_distribution
from .fock import (BeamSplitterSpec, PhotonDistribution, bs_coefficient, bs_output_distribution,
                   general_bs_amplitude)
from .multimode import gaussian_sample_bsv, multimode_joint_distribution, unequal_beam_joint
from .sampling import SampleBatch
from .source import (GainFit, TwinBeamSpec, fit_gain, fock_weights, g2_to_modes,
                     mean_photons_per_mode, modes_to_g2)

__version__ = "0.1.0"
