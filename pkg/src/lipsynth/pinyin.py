"""Toneless Pinyin decomposition and syllable-to-viseme mapping.

A Mandarin syllable splits into an optional initial (the consonantal onset,
including the glides y/w) and a final (the vowel-centered rhyme). Each part
maps onto one of 14 dynamic viseme categories; a full syllable yields an
ordered sequence of one to three viseme IDs.

The mapping itself is data: a table document assigns one viseme per initial
and one or two visemes per final, so phonological judgment calls (which
compound finals decompose into glide sequences, which carry a dedicated
recorded cycle) can be overridden without touching code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources

from .errors import MappingError, PinyinError


class VisemeId(str, Enum):
    """The 14 dynamic viseme categories."""

    V1_BPM = "V1_BPM"    # bilabial closure (b, p, m)
    V2_F = "V2_F"        # labiodental lip-biting (f)
    V3_D = "V3_D"        # apical, slightly spread (d, t, n, l)
    V4_GKH = "V4_GKH"    # velar, neutral open (g, k, h)
    V5_JQX = "V5_JQX"    # palatal, unrounded open (j, q, x, y)
    V6_ZCS = "V6_ZCS"    # dental sibilant, teeth bared (z, c, s)
    V7_ZH = "V7_ZH"      # retroflex, slightly pursed (zh, ch, sh, r, er)
    V8_A = "V8_A"        # wide open
    V9_O = "V9_O"        # mid rounded
    V10_E = "V10_E"      # mid spread
    V11_I = "V11_I"      # tight spread
    V12_U = "V12_U"      # tight rounded
    V13_V = "V13_V"      # funneled / pursed (u-umlaut group)
    V14_AI = "V14_AI"    # semi-open gliding


VISEME_IDS: tuple[str, ...] = tuple(v.value for v in VisemeId)

# Two-letter initials must win the longest match before single letters.
_DIGRAPH_INITIALS = ("zh", "ch", "sh")
_SINGLE_INITIALS = tuple("bpmfdtnlgkhjqxrzcsyw")
INITIALS: frozenset[str] = frozenset(_DIGRAPH_INITIALS) | frozenset(_SINGLE_INITIALS)

# Spelled finals reachable after stripping an initial (plus the u-umlaut
# v-forms and ueng for completeness). A mapping table must cover all of them.
FINALS: tuple[str, ...] = (
    "a", "o", "e", "i", "u", "v", "er",
    "ai", "ei", "ao", "ou",
    "an", "en", "ang", "eng", "ong",
    "ia", "ie", "iao", "iu", "ian", "in", "iang", "ing", "iong",
    "ua", "uo", "uai", "ui", "uan", "un", "uang", "ueng",
    "ue", "ve", "van", "vn",
)
_FINAL_SET = frozenset(FINALS)

# After j/q/x/y a spelled u stands for the u-umlaut vowel.
_UMLAUT_CONTEXT = frozenset("jqxy")
_UMLAUT_FINALS = {"u": "v", "ue": "ve", "uan": "van", "un": "vn"}


@dataclass(frozen=True)
class SyllableParts:
    """Initial/final decomposition; ``initial`` is None for zero-initial syllables."""

    initial: str | None
    final: str

    def joined(self) -> str:
        return (self.initial or "") + self.final


VisemeSequence = tuple[VisemeId, ...]


def split_syllable(syllable: str) -> SyllableParts:
    """Split a toneless pinyin syllable by longest-match over the initial set.

    Accepts the u-umlaut both as the literal character and as ``v``. Raises
    :class:`PinyinError` carrying the offending position for empty input,
    characters outside the alphabet, or a final not in the inventory.
    """
    s = syllable.replace("ü", "v")
    if not s:
        raise PinyinError("empty syllable", syllable=syllable, position=0)
    for i, ch in enumerate(s):
        if not ("a" <= ch <= "z"):
            raise PinyinError(
                f"invalid character {ch!r} in syllable {syllable!r} at position {i}",
                syllable=syllable,
                position=i,
            )
    initial: str | None = None
    if s[:2] in _DIGRAPH_INITIALS:
        initial = s[:2]
    elif s[:1] in _SINGLE_INITIALS:
        initial = s[:1]
    final = s[len(initial or ""):]
    if not final:
        raise PinyinError(
            f"syllable {syllable!r} has no final",
            syllable=syllable,
            position=len(s),
        )
    if final not in _FINAL_SET:
        raise PinyinError(
            f"unknown final {final!r} in syllable {syllable!r}",
            syllable=syllable,
            position=len(initial or ""),
        )
    return SyllableParts(initial, final)


@dataclass(frozen=True)
class MappingTable:
    """Immutable initial/final to viseme lookup."""

    initials: dict[str, VisemeId]
    finals: dict[str, VisemeSequence]


def load_mapping_table(text: str) -> MappingTable:
    """Load and validate a mapping-table JSON document.

    The table must assign one viseme to every initial symbol and one or two
    visemes to every final in the inventory.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingError(f"mapping table is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "initials" not in doc or "finals" not in doc:
        raise MappingError("mapping table must contain 'initials' and 'finals' sections")

    initials: dict[str, VisemeId] = {}
    for sym, vid in doc["initials"].items():
        try:
            initials[sym] = VisemeId(vid)
        except ValueError:
            raise MappingError(f"initial {sym!r}: unknown viseme id {vid!r}") from None
    finals: dict[str, VisemeSequence] = {}
    for sym, vids in doc["finals"].items():
        if not isinstance(vids, list) or not 1 <= len(vids) <= 2:
            raise MappingError(f"final {sym!r} must map to 1 or 2 visemes")
        try:
            finals[sym] = tuple(VisemeId(v) for v in vids)
        except ValueError:
            raise MappingError(f"final {sym!r}: unknown viseme id in {vids!r}") from None

    missing_initials = sorted(INITIALS - initials.keys())
    if missing_initials:
        raise MappingError(f"mapping table lacks initial(s): {', '.join(missing_initials)}")
    missing_finals = [f for f in FINALS if f not in finals]
    if missing_finals:
        raise MappingError(f"mapping table lacks final(s): {', '.join(missing_finals)}")
    return MappingTable(initials=initials, finals=finals)


@lru_cache(maxsize=1)
def default_table() -> MappingTable:
    """The shipped default mapping table (``table_v1``)."""
    text = resources.files("lipsynth.data").joinpath("table_v1.json").read_text("utf-8")
    return load_mapping_table(text)


def map_to_visemes(parts: SyllableParts, table: MappingTable) -> VisemeSequence:
    """Map a decomposed syllable to its ordered viseme sequence.

    The spelled final is normalized to its v-form after j/q/x/y before lookup
    (ju, qu, xu, yu and friends are u-umlaut syllables). Adjacent duplicate
    visemes collapse, so e.g. "wu" yields a single tight-rounded viseme.
    """
    final = parts.final
    if parts.initial in _UMLAUT_CONTEXT and final in _UMLAUT_FINALS:
        final = _UMLAUT_FINALS[final]
    ids: list[VisemeId] = []
    if parts.initial is not None:
        try:
            ids.append(table.initials[parts.initial])
        except KeyError:
            raise MappingError(f"no viseme mapping for initial {parts.initial!r}") from None
    try:
        final_ids = table.finals[final]
    except KeyError:
        raise MappingError(f"no viseme mapping for final {final!r}") from None
    ids.extend(final_ids)
    collapsed: list[VisemeId] = [ids[0]]
    for vid in ids[1:]:
        if vid != collapsed[-1]:
            collapsed.append(vid)
    return tuple(collapsed)


def syllable_to_visemes(syllable: str, table: MappingTable | None = None) -> VisemeSequence:
    """Convenience wrapper: split then map."""
    return map_to_visemes(split_syllable(syllable), table or default_table())
