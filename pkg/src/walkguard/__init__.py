"""walkguard: hybrid VAE + one-class-SVM sidewalk hazard detection."""

from . import dataio, evalkit, latentprep, nn, ocsvm, pipeline, synth, vae

__version__ = "0.1.0"

__all__ = ["dataio", "evalkit", "latentprep", "nn", "ocsvm", "pipeline",
           "synth", "vae", "__version__"]
