"""Pipeline configuration: defaults plus an INI-style override file.

Every hand-tuned constant in the pipeline (header pattern, section aliases,
abbreviations, negation triggers, lexicons, classifier term lists, seizure
tie-break order) can be overridden without touching code. The config path
defaults to the SCORE_EXTRACT_CONFIG environment variable.
"""
from __future__ import annotations

import configparser
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .classifiers import DEFAULT_RULES, RuleSet
from .errors import ConfigError
from .model import SectionKind, CanonicalSection, SeizureTypeLabel
from .ner import (
    DEFAULT_NEGATION,
    DEFAULT_TAGGER,
    Lexicon,
    NegationConfig,
    TaggerConfig,
    TaggerMode,
    default_lexicons,
    load_lexicon,
)
from .segmenter import DEFAULT_SEGMENTER, SegmenterConfig

ENV_CONFIG_PATH = "SCORE_EXTRACT_CONFIG"

_SECTIONS = {
    "tagger": {"mode", "endpoint", "timeout", "max_retries"},
    "segmenter": {"header_pattern", "min_header_letters", "abbreviations"},
    "segmenter.aliases": None,  # free-form keys
    "negation": {"triggers", "blockers", "window"},
    "lexicons": {"paths", "extra"},
    "rules": None,  # validated separately (dotted seizure_terms.* keys)
    "output": {"path"},
}

_RULE_KEYS = {"epilepsy_terms", "normal_terms", "abnormal_terms", "seizure_precedence"}


@dataclass(frozen=True)
class PipelineConfig:
    tagger: TaggerConfig = DEFAULT_TAGGER
    segmenter: SegmenterConfig = DEFAULT_SEGMENTER
    negation: NegationConfig = DEFAULT_NEGATION
    lexicons: tuple[Lexicon, ...] = field(default_factory=default_lexicons)
    rules: RuleSet = DEFAULT_RULES
    output_path: str | None = None


DEFAULT_CONFIG = PipelineConfig()


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in value.split(",") if item.strip())


def _parse_seizure_label(token: str, where: str) -> SeizureTypeLabel:
    try:
        return SeizureTypeLabel(token)
    except ValueError:
        valid = ", ".join(l.value for l in SeizureTypeLabel if l is not SeizureTypeLabel.NONE)
        raise ConfigError(f"{where}: unknown seizure type {token!r} (expected one of {valid})") from None


def _parse_tagger(section) -> TaggerConfig:
    mode_raw = section.get("mode", DEFAULT_TAGGER.mode.value)
    try:
        mode = TaggerMode(mode_raw)
    except ValueError:
        valid = ", ".join(m.value for m in TaggerMode)
        raise ConfigError(f"[tagger] mode: unknown mode {mode_raw!r} (expected one of {valid})") from None
    try:
        return TaggerConfig(
            mode=mode,
            remote_endpoint=section.get("endpoint") or None,
            timeout=float(section.get("timeout", DEFAULT_TAGGER.timeout)),
            max_retries=int(section.get("max_retries", DEFAULT_TAGGER.max_retries)),
        )
    except ValueError as exc:
        raise ConfigError(f"[tagger]: {exc}") from None


def _parse_aliases(section) -> dict[str, CanonicalSection]:
    aliases = dict(DEFAULT_SEGMENTER.aliases)
    known = {k.value: k for k in SectionKind if k is not SectionKind.OTHER}
    for header, target in section.items():
        kind = known.get(target.strip())
        if kind is None:
            raise ConfigError(
                f"[segmenter.aliases] {header}: unknown canonical section {target!r} "
                f"(expected one of {', '.join(sorted(known))})"
            )
        aliases[" ".join(header.split()).upper()] = CanonicalSection(kind)
    return aliases


def _parse_rules(section, where: str) -> RuleSet:
    epilepsy = DEFAULT_RULES.epilepsy_terms
    normal = DEFAULT_RULES.normal_terms
    abnormal = DEFAULT_RULES.abnormal_terms
    precedence = DEFAULT_RULES.seizure_precedence
    seizure_terms = dict(DEFAULT_RULES.seizure_terms)
    for key, value in section.items():
        if key == "epilepsy_terms":
            epilepsy = _split_list(value)
        elif key == "normal_terms":
            normal = _split_list(value)
        elif key == "abnormal_terms":
            abnormal = _split_list(value)
        elif key == "seizure_precedence":
            labels = [_parse_seizure_label(t, f"{where} seizure_precedence") for t in _split_list(value)]
            if len(set(labels)) != len(labels):
                raise ConfigError(f"{where} seizure_precedence: duplicate entries")
            # Unlisted types keep their default relative order at the end.
            precedence = tuple(labels) + tuple(
                l for l in DEFAULT_RULES.seizure_precedence if l not in labels
            )
        elif key.startswith("seizure_terms."):
            label = _parse_seizure_label(key.split(".", 1)[1], f"{where} {key}")
            seizure_terms[label] = _split_list(value)
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    return RuleSet(
        epilepsy_terms=epilepsy,
        seizure_terms=seizure_terms,
        seizure_precedence=precedence,
        abnormal_terms=abnormal,
        normal_terms=normal,
    )


def _resolve(base: Path, candidate: str) -> Path:
    path = Path(candidate)
    return path if path.is_absolute() else base / path


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Load a PipelineConfig, or the defaults when no file is given.

    Raises ConfigError for unknown sections/keys, bad values, and lexicon
    paths that do not exist.
    """
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH) or None
    if path is None:
        return DEFAULT_CONFIG
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # alias headers are case-sensitive data
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{path}: unknown section [{section}]")
        allowed = _SECTIONS[section]
        if allowed is None:
            continue
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
    if parser.has_section("rules"):
        for key in parser["rules"]:
            if key not in _RULE_KEYS and not key.startswith("seizure_terms."):
                raise ConfigError(f"{path}: unknown key {key!r} in [rules]")

    tagger = _parse_tagger(parser["tagger"]) if parser.has_section("tagger") else DEFAULT_TAGGER

    segmenter = DEFAULT_SEGMENTER
    if parser.has_section("segmenter") or parser.has_section("segmenter.aliases"):
        seg_section = parser["segmenter"] if parser.has_section("segmenter") else {}
        aliases = (
            _parse_aliases(parser["segmenter.aliases"])
            if parser.has_section("segmenter.aliases")
            else dict(DEFAULT_SEGMENTER.aliases)
        )
        try:
            segmenter = SegmenterConfig(
                header_pattern=seg_section.get("header_pattern", DEFAULT_SEGMENTER.header_pattern),
                min_header_letters=int(
                    seg_section.get("min_header_letters", DEFAULT_SEGMENTER.min_header_letters)
                ),
                aliases=aliases,
                abbreviations=_split_list(seg_section.get("abbreviations", ""))
                or DEFAULT_SEGMENTER.abbreviations,
            )
            segmenter.header_regex()  # validate the pattern eagerly
        except (ValueError, re.error) as exc:
            raise ConfigError(f"[segmenter]: {exc}") from None

    negation = DEFAULT_NEGATION
    if parser.has_section("negation"):
        section = parser["negation"]
        try:
            negation = NegationConfig(
                triggers=_split_list(section.get("triggers", "")) or DEFAULT_NEGATION.triggers,
                blockers=_split_list(section.get("blockers", "")) or DEFAULT_NEGATION.blockers,
                window=int(section.get("window", DEFAULT_NEGATION.window)),
            )
        except ValueError as exc:
            raise ConfigError(f"[negation]: {exc}") from None

    lexicons = default_lexicons()
    if parser.has_section("lexicons"):
        section = parser["lexicons"]
        base = path.parent
        if section.get("paths"):
            lexicons = ()
            for candidate in _split_list(section["paths"]):
                lexicons += (_load_lexicon_checked(_resolve(base, candidate)),)
        for candidate in _split_list(section.get("extra", "")):
            lexicons += (_load_lexicon_checked(_resolve(base, candidate)),)

    rules = _parse_rules(parser["rules"], f"{path} [rules]") if parser.has_section("rules") else DEFAULT_RULES

    output_path = parser.get("output", "path", fallback=None) or None

    return PipelineConfig(
        tagger=tagger,
        segmenter=segmenter,
        negation=negation,
        lexicons=lexicons,
        rules=rules,
        output_path=output_path,
    )


def _load_lexicon_checked(path: Path) -> Lexicon:
    if not path.is_file():
        raise ConfigError(f"lexicon file not found: {path}")
    return load_lexicon(path)
