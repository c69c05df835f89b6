"""Seeded synthetic corpora: benign files with randomized content and
malicious-style files carrying the per-format indicators the analyzers look
for. Same (config, seed) always produces byte-identical output.
"""

from .corpus import SynthConfig, synthesize, write_corpus
from .cfbwrite import CfbWriter
from .ovbawrite import build_vba_project, ovba_compress

__all__ = [
    "SynthConfig",
    "synthesize",
    "write_corpus",
    "CfbWriter",
    "build_vba_project",
    "ovba_compress",
]
