"""Convolutional variational autoencoder and reconstruction-based scoring.

The encoder halves the spatial dims once per stage (kernel 5, stride 2,
padding 2) and ends in two linear heads for the latent mean and log-variance;
the decoder mirrors it with transposed convolutions (kernel 4, stride 2,
padding 1) and a linear output layer. Pixel I/O is on the [0, 1] scale;
anomaly scores are mean squared error on the 0-255 scale.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DimensionError, NumericError, TrainingError
from .nn.adam import Adam
from .nn.layers import Conv2d, ConvTranspose2d, Linear, ReLU

ENC_KERNEL, ENC_STRIDE, ENC_PAD = 5, 2, 2
DEC_KERNEL, DEC_STRIDE, DEC_PAD = 4, 2, 1

# scores are reported as MSE on the 0-255 pixel scale
SCORE_SCALE = 255.0 ** 2

PRESETS = {
    "canonical": ((3, 240, 320), (32, 64, 128, 256), 1024),
    "desk": ((3, 64, 64), (8, 16, 32, 64), 64),
}


@dataclass(frozen=True)
class VaeConfig:
    input_shape: tuple  # (C, H, W)
    channels: tuple
    latent_dim: int
    preset: str = "custom"

    @classmethod
    def from_preset(cls, name):
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}")
        shape, channels, latent = PRESETS[name]
        return cls(shape, channels, latent, preset=name)

    def validate(self):
        c, h, w = self.input_shape
        div = 2 ** len(self.channels)
        if h % div or w % div:
            raise ConfigError(
                f"spatial dims {h}x{w} must be divisible by {div} "
                f"for {len(self.channels)} encoder stages")
        if self.latent_dim < 1 or not self.channels or c < 1:
            raise ConfigError("channels, latent_dim and input channels must be positive")


@dataclass
class EncoderOutput:
    mu: np.ndarray
    logvar: np.ndarray


@dataclass
class LatentSample:
    eps: np.ndarray
    z: np.ndarray


@dataclass
class LossBreakdown:
    total: float
    recon_term: float
    kl_term: float


@dataclass
class AnomalyFlag:
    value: int  # +1 = no anomaly, -1 = anomaly
    score: float


@dataclass
class TrainSettings:
    epochs: int = 50
    batch_size: int = 16
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


class VaeModel:
    def __init__(self, config: VaeConfig, seed=0, dtype=np.float32):
        config.validate()
        self.config = config
        self.dtype = dtype
        rng = np.random.default_rng(seed)
        c, h, w = config.input_shape
        chans = config.channels

        self.encoder = []
        prev = c
        for i, ch in enumerate(chans):
            self.encoder.append(Conv2d(prev, ch, ENC_KERNEL, ENC_STRIDE, ENC_PAD,
                                       rng, dtype, name=f"enc_conv{i + 1}"))
            if i < len(chans) - 1:
                self.encoder.append(ReLU())
            prev = ch

        self.feat_hw = (h // 2 ** len(chans), w // 2 ** len(chans))
        self.flat_dim = chans[-1] * self.feat_hw[0] * self.feat_hw[1]
        self.fc_mu = Linear(self.flat_dim, config.latent_dim, rng, dtype, "fc_mu")
        self.fc_logvar = Linear(self.flat_dim, config.latent_dim, rng, dtype,
                                "fc_logvar")
        self.fc_dec = Linear(config.latent_dim, self.flat_dim, rng, dtype, "fc_dec")

        self.decoder = []
        rev = list(chans[::-1])
        for i in range(len(rev) - 1):
            self.decoder.append(ConvTranspose2d(rev[i], rev[i + 1], DEC_KERNEL,
                                                DEC_STRIDE, DEC_PAD, rng, dtype,
                                                name=f"dec_convt{i + 1}"))
            self.decoder.append(ReLU())
        self.decoder.append(ConvTranspose2d(rev[-1], c, DEC_KERNEL, DEC_STRIDE,
                                            DEC_PAD, rng, dtype,
                                            name=f"dec_convt{len(rev)}"))

    # -- parameter bookkeeping -------------------------------------------------

    def _layers(self):
        yield from self.encoder
        yield self.fc_mu
        yield self.fc_logvar
        yield self.fc_dec
        yield from self.decoder

    def parameters(self):
        out = {}
        for layer in self._layers():
            out.update(layer.parameters())
        return out

    def gradients(self):
        out = {}
        for layer in self._layers():
            out.update(layer.gradients())
        return out

    def zero_grad(self):
        for layer in self._layers():
            layer.zero_grad()

    def layer_param_counts(self):
        """Per trainable layer: (name, parameter count), architecture order."""
        counts = []
        for layer in self._layers():
            params = layer.parameters()
            if params:
                counts.append((layer.name, sum(p.size for p in params.values())))
        return counts

    def total_param_count(self):
        return sum(n for _, n in self.layer_param_counts())

    # -- forward paths ---------------------------------------------------------

    def _check_frame(self, x):
        if x.shape != self.config.input_shape:
            raise DimensionError(
                f"frame shape {x.shape} does not match model input "
                f"{self.config.input_shape}")

    def _encode_batch(self, x):
        h = x
        for layer in self.encoder:
            h = layer.forward(h)
        hf = h.reshape(x.shape[0], -1)
        return self.fc_mu.forward(hf), self.fc_logvar.forward(hf), h.shape

    def _decode_batch(self, z):
        c0 = self.config.channels[-1]
        d = self.fc_dec.forward(z)
        d = d.reshape(z.shape[0], c0, *self.feat_hw)
        for layer in self.decoder:
            d = layer.forward(d)
        return d

    def encode(self, x) -> EncoderOutput:
        self._check_frame(x)
        mu, logvar, _ = self._encode_batch(x[None].astype(self.dtype, copy=False))
        return EncoderOutput(mu[0], logvar[0])

    def decode(self, z):
        z = np.asarray(z, dtype=self.dtype)
        if z.shape != (self.config.latent_dim,):
            raise DimensionError(
                f"latent length {z.shape} does not match {self.config.latent_dim}")
        return self._decode_batch(z[None])[0]

    # -- training --------------------------------------------------------------

    def loss_and_grads(self, x, eps):
        """One forward+backward over a batch; gradients accumulate into layers.

        Loss is the per-frame mean of (reconstruction sum-of-squares / 2 + KL).
        """
        n = x.shape[0]
        mu, logvar, enc_shape = self._encode_batch(x)
        sigma = np.exp(0.5 * logvar)
        z = mu + sigma * eps
        recon = self._decode_batch(z)

        diff = recon - x
        recon_term = 0.5 * float(np.sum(diff.astype(np.float64) ** 2)) / n
        mu64 = mu.astype(np.float64)
        lv64 = logvar.astype(np.float64)
        kl_term = 0.5 * float(np.sum(mu64 ** 2 + np.exp(lv64) - 1.0 - lv64)) / n
        total = recon_term + kl_term

        gr = diff / n
        for layer in reversed(self.decoder):
            gr = layer.backward(gr)
        gz = self.fc_dec.backward(gr.reshape(n, -1))
        gmu = gz + mu / n
        glogvar = gz * eps * (0.5 * sigma) + 0.5 * (np.exp(logvar) - 1.0) / n
        ghf = self.fc_mu.backward(gmu) + self.fc_logvar.backward(glogvar)
        gh = ghf.reshape(enc_shape)
        for layer in reversed(self.encoder):
            gh = layer.backward(gh)
        return LossBreakdown(total, recon_term, kl_term)


def build_vae(config: VaeConfig, seed=0, dtype=np.float32) -> VaeModel:
    return VaeModel(config, seed=seed, dtype=dtype)


def reparameterize(enc: EncoderOutput, eps) -> LatentSample:
    eps = np.asarray(eps)
    if eps.shape != enc.mu.shape:
        raise DimensionError(
            f"noise length {eps.shape} does not match latent {enc.mu.shape}")
    z = enc.mu + np.exp(0.5 * enc.logvar) * eps
    return LatentSample(eps=eps, z=z)


def kl_divergence(enc: EncoderOutput) -> float:
    mu = np.asarray(enc.mu, dtype=np.float64)
    logvar = np.asarray(enc.logvar, dtype=np.float64)
    if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(logvar))):
        raise NumericError("kl_divergence requires finite mu and logvar")
    return 0.5 * float(np.sum(mu ** 2 + np.exp(logvar) - 1.0 - logvar))


def elbo_loss(x, recon, enc: EncoderOutput) -> LossBreakdown:
    x = np.asarray(x)
    recon = np.asarray(recon)
    if x.shape != recon.shape:
        raise DimensionError(
            f"input {x.shape} and reconstruction {recon.shape} shapes differ")
    recon_term = 0.5 * float(np.sum((x.astype(np.float64) - recon) ** 2))
    kl_term = kl_divergence(enc)
    return LossBreakdown(recon_term + kl_term, recon_term, kl_term)


def train_vae(frames, config: VaeConfig, settings: TrainSettings = None, seed=0,
              dtype=np.float32, log_lines=None):
    """Train on normal-only frames; returns the model.

    If log_lines is a list, one tab-separated line per epoch
    (epoch, total, recon, kl) is appended to it.
    """
    settings = settings or TrainSettings()
    frames = np.asarray(frames, dtype=dtype)
    if frames.ndim != 4 or frames.shape[0] == 0:
        raise DataError("training set must be a nonempty (N, C, H, W) array")
    if frames.shape[1:] != config.input_shape:
        raise DataError(
            f"frame shape {frames.shape[1:]} does not match config "
            f"{config.input_shape}")

    model = VaeModel(config, seed=seed, dtype=dtype)
    opt = Adam(settings.lr, settings.beta1, settings.beta2, settings.epsilon)
    rng = np.random.default_rng(seed)
    n = frames.shape[0]

    for epoch in range(1, settings.epochs + 1):
        perm = rng.permutation(n)
        tot = rec = kl = 0.0
        nb = 0
        for start in range(0, n, settings.batch_size):
            batch = frames[perm[start:start + settings.batch_size]]
            eps = rng.standard_normal(
                (batch.shape[0], config.latent_dim)).astype(dtype)
            model.zero_grad()
            loss = model.loss_and_grads(batch, eps)
            if not np.isfinite(loss.total):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch}, batch {nb}")
            opt.step(model.parameters(), model.gradients())
            tot += loss.total
            rec += loss.recon_term
            kl += loss.kl_term
            nb += 1
        if log_lines is not None:
            log_lines.append(
                f"{epoch}\t{tot / nb:.6f}\t{rec / nb:.6f}\t{kl / nb:.6f}")
    return model


def reconstruction_score(model: VaeModel, x, sample_count=10, seed=0, rng=None):
    """Mean over latent samples of per-pixel MSE on the 0-255 scale."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if rng is None:
        rng = np.random.default_rng(seed)
    enc = model.encode(x)
    x64 = np.asarray(x, dtype=np.float64)
    acc = 0.0
    for _ in range(sample_count):
        eps = rng.standard_normal(enc.mu.shape).astype(model.dtype)
        sample = reparameterize(enc, eps)
        recon = model.decode(sample.z)
        acc += float(np.mean((x64 - recon) ** 2))
    return SCORE_SCALE * acc / sample_count


def anomaly_flag(score, threshold) -> AnomalyFlag:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return AnomalyFlag(value=1 if score < threshold else -1, score=float(score))
