"""Maximum-likelihood decoding of binary linear codes by guessing noise patterns."""

from .codes import LinearCode, ca_polar_code, hamming_code, load_code, random_linear_code, save_code
from .decoder import DecodeOutcome, HardDecoder, brute_force_ml, grandab, sgrandab, sgrandab_symbol
from .modem import ChannelSpec, Modulation, SoftObservation, add_awgn, modulate, observe, symbol_posteriors
from .sequencer import BitSequencer, SymbolSequencer

__version__ = "0.1.0"
