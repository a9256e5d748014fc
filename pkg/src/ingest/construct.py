import asyncio
import json
import logging
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, List, Optional, Union

import aiofiles

from src.profile.profile_frame import ProfileFrame
from src.utils.config import Config
from src.utils.errors import InvalidArity, ParseError, UnknownFormat
from .readers import from_literal, parse_canonical

logger = logging.getLogger(__name__)

CANONICAL_EXTENSIONS = (".json",)


class SourceKind(str, Enum):
    CANONICAL_JSON = "canonical-json"
    LITERAL = "literal"
    UNKNOWN = "unknown"


@dataclass
class ProfileSource:
    """A path or an in-memory literal tree, with an optional exec_id override"""
    source: Any
    exec_id: Optional[str] = None
    detected_kind: SourceKind = SourceKind.UNKNOWN

    @property
    def is_literal(self) -> bool:
        return isinstance(self.source, (dict, list))

    @property
    def path(self) -> Path:
        return Path(self.source)

    def describe(self) -> str:
        return "<literal>" if self.is_literal else str(self.source)


def detect_kind(source: ProfileSource, content: Optional[bytes] = None) -> SourceKind:
    """Extension first, then the document's schema tag"""
    if source.is_literal:
        return SourceKind.LITERAL
    if not isinstance(source.source, (str, os.PathLike)):
        return SourceKind.UNKNOWN
    if source.path.suffix.lower() in CANONICAL_EXTENSIONS:
        return SourceKind.CANONICAL_JSON
    if content:
        try:
            document = json.loads(content)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return SourceKind.UNKNOWN
        if isinstance(document, dict) and document.get("schema") == Config.SCHEMA_TAG:
            return SourceKind.CANONICAL_JSON
    return SourceKind.UNKNOWN


def _as_source(item: Union[ProfileSource, Any]) -> ProfileSource:
    return item if isinstance(item, ProfileSource) else ProfileSource(item)


async def _read_bytes(source: ProfileSource) -> Optional[bytes]:
    if source.is_literal or not isinstance(source.source, (str, os.PathLike)):
        return None
    async with aiofiles.open(source.path, "rb") as fh:
        return await fh.read()


def _load(index: int, source: ProfileSource, content: Optional[bytes]) -> ProfileFrame:
    source.detected_kind = detect_kind(source, content)
    if source.detected_kind is SourceKind.UNKNOWN:
        raise UnknownFormat(index, source.describe())

    if source.detected_kind is SourceKind.LITERAL:
        pf = from_literal(source.source, exec_id=source.exec_id or "literal")
    else:
        pf = parse_canonical(content, default_exec_id=source.path.stem, source=str(source.path))
        if source.exec_id:
            pf.exec_id = source.exec_id
    logger.info(f"[INGEST] Source #{index} {source.describe()} -> {source.detected_kind.value} "
                f"exec_id={pf.exec_id!r}")
    return pf


async def aconstruct_from(sources: Iterable[Union[ProfileSource, Any]]) -> List[ProfileFrame]:
    """
    Load every source, reading files concurrently. All-or-nothing: the first
    failing source raises and nothing is returned.
    """
    sources = [_as_source(item) for item in sources]
    if not sources:
        raise InvalidArity("construct_from needs at least one source")

    contents = await asyncio.gather(*(_read_bytes(source) for source in sources), return_exceptions=True)

    profiles = []
    for index, (source, content) in enumerate(zip(sources, contents)):
        if isinstance(content, Exception):
            logger.error(f"[INGEST] Failed to read source #{index} {source.describe()}: {content}")
            raise ParseError(f"source #{index} ({source.describe()}): {content}") from content
        try:
            profiles.append(_load(index, source, content))
        except Exception as e:
            logger.error(f"[INGEST] Failed to load source #{index} {source.describe()}: {e}")
            raise

    logger.info(f"[INGEST] Loaded {len(profiles)} profiles")
    return profiles


def construct_from(sources: Iterable[Union[ProfileSource, Any]]) -> List[ProfileFrame]:
    """Synchronous wrapper around aconstruct_from; must not be called from a running event loop"""
    return asyncio.run(aconstruct_from(sources))
