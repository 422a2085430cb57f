"""Transformer sentence encoder with cls / mean pooling."""

import numpy as np
import torch

POOLING_MODES = ("cls", "mean")


class EncoderError(Exception):
    """The model could not be loaded or produced unusable vectors."""


class TransformerEncoder:
    """Encode sentences with a Hugging Face encoder model.

    ``model_id`` is any local path or hub identifier accepted by
    ``AutoModel`` / ``AutoTokenizer``. ``cls`` pooling takes the hidden
    state of the first (classification) token; ``mean`` averages token
    hidden states under the attention mask.
    """

    def __init__(
        self,
        model_id: str,
        pooling: str = "cls",
        batch_size: int = 32,
        device: str = "cpu",
    ) -> None:
        if pooling not in POOLING_MODES:
            raise EncoderError(f"pooling must be one of {POOLING_MODES}, got {pooling!r}")
        if batch_size < 1:
            raise EncoderError(f"batch_size must be >= 1, got {batch_size}")
        from transformers import AutoModel, AutoTokenizer

        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id).to(device).eval()
        except Exception as exc:  # transformers raises a wide family here
            raise EncoderError(f"cannot load model {model_id!r}: {exc}") from exc
        self.model_id = model_id
        self.pooling = pooling
        self.batch_size = batch_size
        self.device = device
        self.dimension = int(self.model.config.hidden_size)

    def encode(self, sentences: list[str]) -> np.ndarray:
        """Return an array of shape ``(len(sentences), dimension)``."""
        if not sentences:
            return np.empty((0, self.dimension), dtype=np.float64)
        chunks: list[np.ndarray] = []
        with torch.no_grad():
            for start in range(0, len(sentences), self.batch_size):
                batch = sentences[start : start + self.batch_size]
                encoded = self.tokenizer(
                    batch, padding=True, truncation=True, return_tensors="pt"
                ).to(self.device)
                hidden = self.model(**encoded).last_hidden_state
                if self.pooling == "cls":
                    pooled = hidden[:, 0, :]
                else:
                    mask = encoded["attention_mask"].unsqueeze(-1).to(hidden.dtype)
                    pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
                chunks.append(pooled.cpu().numpy().astype(np.float64))
        out = np.concatenate(chunks, axis=0)
        if not np.all(np.isfinite(out)):
            raise EncoderError(f"model {self.model_id!r} produced non-finite vectors")
        return out
