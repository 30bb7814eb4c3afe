"""Named parameter store, initialization and binary checkpointing.

Every trainable array is addressable by name, which is what the
optimizer, the gradient checker and the checkpoint format key on.  The
fixed pretrained word table lives alongside the trainable parameters but
is excluded from the update set.
"""

from __future__ import annotations

import io
import struct

import numpy as np

from ..config import SQ_ATTENTION, SQ_AVERAGE, VANILLA, TrainConfig, parse_config
from ..treebank import PretrainedVectors, Vocabulary

MAGIC = b"SQPCKPT1\n"

# Never receives gradients or optimizer updates.
FIXED_PARAMS = ("emb_word_fixed",)


class ModelParams:
    def __init__(self, values: dict[str, np.ndarray]):
        self.values = values

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]

    def __contains__(self, name):
        return name in self.values

    def names(self) -> list[str]:
        return list(self.values)

    def trainable_names(self) -> list[str]:
        return [n for n in self.values if n not in FIXED_PARAMS]

    @property
    def dtype(self):
        return self.values["embed_b"].dtype

    def zero_grads(self) -> dict[str, np.ndarray]:
        return {n: np.zeros_like(self.values[n]) for n in self.trainable_names()}

    def astype(self, dtype) -> "ModelParams":
        return ModelParams({n: v.astype(dtype) for n, v in self.values.items()})

    def copy(self) -> "ModelParams":
        return ModelParams({n: v.copy() for n, v in self.values.items()})

    def l2_norm_squared(self) -> float:
        return float(sum((self.values[n].astype(np.float64) ** 2).sum()
                         for n in self.trainable_names()))


def _glorot(rng, shape, dtype):
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def _small(rng, shape, dtype):
    return rng.uniform(-0.1, 0.1, size=shape).astype(dtype)


def _lstm_block(rng, values, prefix, in_dim, hidden, dtype, learned_init):
    values[f"{prefix}_W"] = _glorot(rng, (4 * hidden, in_dim), dtype)
    values[f"{prefix}_R"] = _glorot(rng, (4 * hidden, hidden), dtype)
    b = np.zeros(4 * hidden, dtype=dtype)
    b[hidden:2 * hidden] = 1.0  # forget-gate bias starts open
    values[f"{prefix}_b"] = b
    for gate in ("pi", "pf", "po"):
        values[f"{prefix}_{gate}"] = np.zeros(hidden, dtype=dtype)
    if learned_init:
        values[f"{prefix}_h0"] = _small(rng, (hidden,), dtype)
        values[f"{prefix}_c0"] = _small(rng, (hidden,), dtype)


def _attention_block(rng, values, prefix, h_dim, s_dim, att_dim, dtype):
    values[f"{prefix}_W"] = _glorot(rng, (att_dim, h_dim + s_dim), dtype)
    values[f"{prefix}_b"] = np.zeros(att_dim, dtype=dtype)
    values[f"{prefix}_v"] = _small(rng, (att_dim,), dtype)


def context_width(cfg: TrainConfig) -> int:
    h_dim = 2 * cfg.encoder_hidden_dim
    return h_dim if cfg.decoder_variant == VANILLA else 2 * h_dim


def init_params(cfg: TrainConfig, vocab: Vocabulary, seed: int | None = None,
                dtype=np.float32, vectors: PretrainedVectors | None = None) -> ModelParams:
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    values: dict[str, np.ndarray] = {}

    values["emb_word"] = _small(rng, (vocab.n_words, cfg.word_dim), dtype)
    fixed_dim = vectors.dim if vectors is not None else cfg.fixed_word_dim
    fixed = np.zeros((vocab.n_words, fixed_dim), dtype=dtype)
    if vectors is not None:
        for word, wid in vocab.word_to_id.items():
            vec = vectors.get(word)
            if vec is not None:
                fixed[wid] = np.asarray(vec, dtype=dtype)
    values["emb_word_fixed"] = fixed
    values["emb_pos"] = _small(rng, (vocab.n_pos, cfg.pos_dim), dtype)
    # One extra action row: the learned start-of-sequence embedding.
    values["emb_action"] = _small(rng, (vocab.n_actions + 1, cfg.action_dim), dtype)
    # Reserved for label-aware decoder variants; unused by the current ones.
    values["emb_label"] = _small(rng, (max(vocab.n_labels, 1), cfg.label_dim), dtype)

    concat_dim = cfg.pos_dim + fixed_dim + cfg.word_dim
    values["embed_W"] = _glorot(rng, (cfg.encoder_input_dim, concat_dim), dtype)
    values["embed_b"] = np.zeros(cfg.encoder_input_dim, dtype=dtype)

    enc_h = cfg.encoder_hidden_dim
    in_dim = cfg.encoder_input_dim
    for layer in range(1, cfg.encoder_layers + 1):
        for direction in ("f", "b"):
            _lstm_block(rng, values, f"enc{layer}_{direction}", in_dim, enc_h,
                        dtype, learned_init=True)
        in_dim = 2 * enc_h

    h_dim = 2 * enc_h
    s_dim = cfg.decoder_hidden_dim
    if cfg.decoder_variant == VANILLA:
        _attention_block(rng, values, "att_full", h_dim, s_dim, cfg.attention_dim, dtype)
    elif cfg.decoder_variant == SQ_ATTENTION:
        _attention_block(rng, values, "att_stack", h_dim, s_dim, cfg.attention_dim, dtype)
        _attention_block(rng, values, "att_queue", h_dim, s_dim, cfg.attention_dim, dtype)

    v_dim = s_dim + cfg.action_dim + context_width(cfg)
    values["dec_in_W"] = _glorot(rng, (cfg.decoder_input_dim, v_dim), dtype)
    values["dec_in_b"] = np.zeros(cfg.decoder_input_dim, dtype=dtype)
    _lstm_block(rng, values, "dec", cfg.decoder_input_dim, s_dim, dtype, learned_init=False)

    values["out_W"] = _glorot(rng, (vocab.n_actions, s_dim), dtype)
    values["out_b"] = np.zeros(vocab.n_actions, dtype=dtype)
    return ModelParams(values)


# ---------------------------------------------------------------------------
# Checkpoint format: magic, length-prefixed config text, length-prefixed
# vocabulary text, then each named parameter as (name, shape, raw
# little-endian float32).  Round-trips bit-exactly.
# ---------------------------------------------------------------------------

def _write_block(fh, data: bytes):
    fh.write(struct.pack("<I", len(data)))
    fh.write(data)


def _read_block(fh) -> bytes:
    (length,) = struct.unpack("<I", fh.read(4))
    return fh.read(length)


def save_checkpoint(path: str, params: ModelParams, cfg: TrainConfig, vocab: Vocabulary):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        _write_block(fh, cfg.to_text().encode("utf-8"))
        _write_block(fh, vocab.to_text().encode("utf-8"))
        names = params.names()
        fh.write(struct.pack("<I", len(names)))
        for name in names:
            arr = np.ascontiguousarray(params[name], dtype="<f4")
            _write_block(fh, name.encode("utf-8"))
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            raw = arr.tobytes()
            fh.write(struct.pack("<Q", len(raw)))
            fh.write(raw)


def load_checkpoint(path: str) -> tuple[ModelParams, TrainConfig, Vocabulary]:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path} is not a model checkpoint (bad magic)")
        cfg = parse_config(_read_block(fh).decode("utf-8"))
        vocab = Vocabulary.from_text(_read_block(fh).decode("utf-8"))
        (n_params,) = struct.unpack("<I", fh.read(4))
        values = {}
        for _ in range(n_params):
            name = _read_block(fh).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            (nbytes,) = struct.unpack("<Q", fh.read(8))
            raw = fh.read(nbytes)
            values[name] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
        return ModelParams(values), cfg, vocab


def checkpoint_bytes_equal(path_a: str, path_b: str) -> bool:
    with open(path_a, "rb") as fa, open(path_b, "rb") as fb:
        return fa.read() == fb.read()


def params_to_buffer(params: ModelParams) -> bytes:
    buf = io.BytesIO()
    for name in params.names():
        buf.write(name.encode("utf-8"))
        buf.write(np.ascontiguousarray(params[name], dtype="<f4").tobytes())
    return buf.getvalue()
