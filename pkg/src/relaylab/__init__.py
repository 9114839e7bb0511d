"""relaylab: link-level simulation and closed-form analysis of
bidirectional amplify-and-forward relay selection with outdated CSI and
channel estimation error."""

from .analytics import (AsymptoticCoeffs, ModulationConstants,
                        asymptotic_coeffs, asymptotic_ser, cdf_gamma1,
                        diversity_order, marginal_cdf_selected_gain,
                        modulation_constants, ser_by_integration)
from .channel import (CsiParams, RelayChannelSet, cee_coefficient,
                      derive_csi_params, jakes_correlation,
                      sample_relay_channels)
from .experiment import (ConfigError, Scenario, SerPoint, emit_csv,
                         parse_scenario_file, run_scenario,
                         shipped_scenario_path)
from .selection import SelectionResult, best_worse_channel
from .transceiver import (SerEstimate, SystemConfig, TrialOutcome,
                          amplification_factor, estimate_ser,
                          instantaneous_snr_exact,
                          instantaneous_snr_simplified, run_trial,
                          sample_selected_snr, symbol_alphabet,
                          wilson_interval)

__version__ = "0.1.0"
