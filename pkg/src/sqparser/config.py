"""Training configuration: model dimensions, optimizer settings and the
line-oriented ``key = value`` config file format."""

from __future__ import annotations

from dataclasses import dataclass, fields

VANILLA = "vanilla"
SQ_AVERAGE = "sq-average"
SQ_ATTENTION = "sq-attention"
DECODER_VARIANTS = (VANILLA, SQ_AVERAGE, SQ_ATTENTION)
FORMALISMS = ("dependency", "constituent")


class ConfigError(ValueError):
    pass


@dataclass
class TrainConfig:
    # model dimensions
    encoder_layers: int = 2
    decoder_layers: int = 1
    word_dim: int = 64
    fixed_word_dim: int = 100
    pos_dim: int = 6
    label_dim: int = 20
    action_dim: int = 40
    encoder_input_dim: int = 100
    encoder_hidden_dim: int = 200
    decoder_hidden_dim: int = 400
    attention_dim: int = 50
    # Width of the projected vector fed to the decoder LSTM; free choice,
    # kept at the decoder hidden width by default.
    decoder_input_dim: int = 400
    # optimization
    l2: float = 1e-6
    adam_alpha: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    grad_clip: float = 5.0
    epochs: int = 30
    seed: int = 1
    shuffle: bool = True
    # task
    decoder_variant: str = SQ_ATTENTION
    formalism: str = "dependency"
    min_freq: int = 2
    max_open_nts: int = 100

    def __post_init__(self):
        self.validate()

    def validate(self):
        for f in fields(self):
            if f.type == "int" and f.name not in ("seed",):
                if getattr(self, f.name) <= 0:
                    raise ConfigError(f"{f.name} must be positive")
        if self.l2 < 0:
            raise ConfigError("l2 must be >= 0")
        if self.grad_clip <= 0:
            raise ConfigError("grad_clip must be positive")
        if self.decoder_variant not in DECODER_VARIANTS:
            raise ConfigError(f"decoder_variant must be one of {DECODER_VARIANTS}")
        if self.formalism not in FORMALISMS:
            raise ConfigError(f"formalism must be one of {FORMALISMS}")
        if self.decoder_layers != 1:
            raise ConfigError("only a single decoder LSTM layer is supported")
        if self.decoder_hidden_dim != 2 * self.encoder_hidden_dim:
            # The decoder starts from the concatenated final encoder states.
            raise ConfigError("decoder_hidden_dim must equal 2 * encoder_hidden_dim")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


def _convert(name: str, kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{name}: expected true/false, got {raw!r}")
    return raw


def parse_config(text: str) -> TrainConfig:
    """Parse ``key = value`` lines.  Blank lines and #-comments are
    ignored; unknown keys are errors."""
    known = {f.name: f.type for f in fields(TrainConfig)}
    values = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, known[key], raw)
        except ValueError as e:
            raise ConfigError(f"config line {lineno}: bad value for {key}: {raw!r}") from e
    return TrainConfig(**values)


def load_config(path: str) -> TrainConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
