"""Text preprocessing: lowercasing, diacritic stripping, punctuation stripping.

Three independent transforms and their eight on/off combinations. The same
config is applied at training and at inference time; the shortlist model
snapshots its config so the two can never drift apart.

Application order inside :func:`normalize` is fixed (lowercase, then
diacritics, then punctuation) so a given config always maps a text to a
single canonical form. Every transform is idempotent, and so is every
composed config.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_WHITESPACE_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class NormalizeConfig:
    """Which transforms are enabled. All eight combinations are valid.

    The default (everything on) is the combination that performed best in
    practice for short Slovak banking queries.
    """

    lowercase: bool = True
    strip_diacritics: bool = True
    strip_punctuation: bool = True

    def to_dict(self) -> dict[str, bool]:
        return {
            "lowercase": self.lowercase,
            "strip_diacritics": self.strip_diacritics,
            "strip_punctuation": self.strip_punctuation,
        }

    @classmethod
    def from_dict(cls, d: dict[str, bool]) -> NormalizeConfig:
        return cls(
            lowercase=bool(d.get("lowercase", True)),
            strip_diacritics=bool(d.get("strip_diacritics", True)),
            strip_punctuation=bool(d.get("strip_punctuation", True)),
        )


def to_lowercase(text: str) -> str:
    """Full Unicode lowercasing."""
    return text.lower()


def strip_diacritics(text: str) -> str:
    """Remove combining marks; letters keep their case.

    Canonical decomposition (NFD), drop all mark code points (categories
    Mn/Mc/Me), recompose (NFC). "zmením účet" becomes "zmenim ucet".
    """
    decomposed = unicodedata.normalize("NFD", text)
    kept = [ch for ch in decomposed if not unicodedata.category(ch).startswith("M")]
    return unicodedata.normalize("NFC", "".join(kept))


def strip_punctuation(text: str) -> str:
    """Remove punctuation code points (Unicode categories P*).

    Whitespace runs left behind by the removal are collapsed to a single
    space and the ends are trimmed, so n-gram features never see empty
    tokens. Symbol categories (S*) and digits are kept.
    """
    kept = [ch for ch in text if not unicodedata.category(ch).startswith("P")]
    return _WHITESPACE_RUN.sub(" ", "".join(kept)).strip()


def normalize(text: str, config: NormalizeConfig) -> str:
    """Apply the enabled transforms in the fixed order.

    With all flags off this is the identity. Idempotent for every config.
    """
    if config.lowercase:
        text = to_lowercase(text)
    if config.strip_diacritics:
        text = strip_diacritics(text)
    if config.strip_punctuation:
        text = strip_punctuation(text)
    return text
