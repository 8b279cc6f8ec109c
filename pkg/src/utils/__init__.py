from .signal import Signal
from .streams import RandomStreams
