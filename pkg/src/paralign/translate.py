"""Pluggable paragraph-preserving machine translation boundary.

Translation engines live behind a process boundary rather than being
linked in, so any engine can be wired up without touching the alignment
core. The package ships test-grade adapters only: an identity adapter
(source text passed through, which makes same-language alignment testable
end to end), a word-mapping dictionary adapter, and a subprocess adapter
speaking a framed line protocol with a per-paragraph disk cache.

Every adapter must return exactly one translated paragraph per input
paragraph. A violated 1:1 contract is a hard error, never silently
realigned.
"""

from __future__ import annotations

import hashlib
import json
import logging
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .textnorm import Document, strip_format_controls

logger = logging.getLogger(__name__)

# Wire framing for the external adapter: each record is a 4-digit decimal
# byte length, the UTF-8 JSON payload, and a newline. The decimal prefix
# caps one payload at 9999 bytes; requests are chunked to fit.
FRAME_PAYLOAD_MAX = 9999
_FRAME_DIGITS = 4


class AdapterUnavailable(RuntimeError):
    """External translation process missing or exited nonzero."""


class LengthMismatch(RuntimeError):
    """Adapter returned a different number of paragraphs than requested."""


class ProtocolError(RuntimeError):
    """Malformed frame or payload on the adapter wire."""


@dataclass(frozen=True)
class TranslationRequest:
    lang: str
    paragraphs: tuple[str, ...]

    def __post_init__(self):
        if not self.paragraphs:
            raise ValueError("translation request must carry paragraphs")
        if any(not p for p in self.paragraphs):
            raise ValueError("translation request paragraphs must be non-empty")


@dataclass(frozen=True)
class TranslationResponse:
    paragraphs: tuple[str, ...]


class Translator:
    """Adapter base: subclasses implement _translate_batch."""

    def translate(self, request: TranslationRequest) -> TranslationResponse:
        out = self._translate_batch(request.lang, list(request.paragraphs))
        if len(out) != len(request.paragraphs):
            raise LengthMismatch(
                f"adapter returned {len(out)} paragraphs for "
                f"{len(request.paragraphs)} requested"
            )
        return TranslationResponse(tuple(out))

    def _translate_batch(self, lang: str, paragraphs: list[str]) -> list[str]:
        raise NotImplementedError


class IdentityTranslator(Translator):
    """Pass paragraphs through unchanged."""

    def _translate_batch(self, lang, paragraphs):
        return list(paragraphs)


class DictionaryTranslator(Translator):
    """Word-for-word mapping; unmapped words pass through."""

    def __init__(self, mapping: dict[str, str]):
        self.mapping = mapping

    def _translate_batch(self, lang, paragraphs):
        return [
            " ".join(self.mapping.get(word, word) for word in para.split())
            for para in paragraphs
        ]


def encode_frame(obj) -> bytes:
    payload = json.dumps(obj, ensure_ascii=False, separators=(",", ":")).encode("utf-8")
    if len(payload) > FRAME_PAYLOAD_MAX:
        raise ProtocolError(f"payload of {len(payload)} bytes exceeds frame capacity")
    return b"%0*d" % (_FRAME_DIGITS, len(payload)) + payload + b"\n"


def decode_frames(data: bytes) -> list:
    """Parse a byte stream of frames; raises ProtocolError on any damage."""
    records = []
    pos = 0
    while pos < len(data):
        header = data[pos : pos + _FRAME_DIGITS]
        if len(header) < _FRAME_DIGITS or not header.isdigit():
            raise ProtocolError(f"bad frame header at byte {pos}: {header!r}")
        length = int(header)
        start = pos + _FRAME_DIGITS
        payload = data[start : start + length]
        if len(payload) < length or data[start + length : start + length + 1] != b"\n":
            raise ProtocolError(f"truncated frame at byte {pos}")
        try:
            records.append(json.loads(payload.decode("utf-8")))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ProtocolError(f"undecodable payload at byte {pos}: {exc}") from exc
        pos = start + length + 1
    return records


def _chunk_paragraphs(lang: str, paragraphs: list[str]) -> list[list[str]]:
    """Greedily pack paragraphs into frames within the payload budget."""
    chunks: list[list[str]] = []
    current: list[str] = []
    for para in paragraphs:
        candidate = current + [para]
        payload = json.dumps(
            {"lang": lang, "paragraphs": candidate},
            ensure_ascii=False,
            separators=(",", ":"),
        ).encode("utf-8")
        if len(payload) <= FRAME_PAYLOAD_MAX:
            current = candidate
            continue
        if not current:
            raise ProtocolError(
                f"single paragraph of {len(payload)} payload bytes exceeds "
                f"frame capacity {FRAME_PAYLOAD_MAX}"
            )
        chunks.append(current)
        current = [para]
        solo = json.dumps(
            {"lang": lang, "paragraphs": current},
            ensure_ascii=False,
            separators=(",", ":"),
        ).encode("utf-8")
        if len(solo) > FRAME_PAYLOAD_MAX:
            raise ProtocolError(
                f"single paragraph of {len(solo)} payload bytes exceeds "
                f"frame capacity {FRAME_PAYLOAD_MAX}"
            )
    if current:
        chunks.append(current)
    return chunks


class ExternalProcessTranslator(Translator):
    """Drive an external translation command over standard streams.

    One framed request record per line in, one framed response record per
    line out, in order. Translations are cached on disk keyed by
    (language, paragraph hash) so reruns avoid re-invoking the process.
    """

    def __init__(self, command: list[str], cache_dir: str | Path):
        self.command = list(command)
        self.cache_dir = Path(cache_dir)

    def _cache_path(self, lang: str, paragraph: str) -> Path:
        digest = hashlib.sha256(paragraph.encode("utf-8")).hexdigest()
        return self.cache_dir / lang / f"{digest}.txt"

    def _translate_batch(self, lang, paragraphs):
        results: dict[int, str] = {}
        pending: list[tuple[int, str]] = []
        for idx, para in enumerate(paragraphs):
            path = self._cache_path(lang, para)
            if path.exists():
                results[idx] = path.read_text(encoding="utf-8")
            else:
                pending.append((idx, para))

        if pending:
            translated = self._run_process(lang, [p for _, p in pending])
            for (idx, para), text in zip(pending, translated):
                results[idx] = text
                path = self._cache_path(lang, para)
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp")
                tmp.write_text(text, encoding="utf-8")
                tmp.replace(path)
        return [results[i] for i in range(len(paragraphs))]

    def _run_process(self, lang: str, paragraphs: list[str]) -> list[str]:
        chunks = _chunk_paragraphs(lang, paragraphs)
        stdin = b"".join(
            encode_frame({"lang": lang, "paragraphs": chunk}) for chunk in chunks
        )
        try:
            proc = subprocess.run(
                self.command, input=stdin, capture_output=True, check=False
            )
        except OSError as exc:
            raise AdapterUnavailable(f"cannot run {self.command}: {exc}") from exc
        if proc.returncode != 0:
            tail = proc.stderr.decode("utf-8", "replace")[-500:]
            raise AdapterUnavailable(
                f"{self.command} exited {proc.returncode}: {tail}"
            )
        records = decode_frames(proc.stdout)
        if len(records) != len(chunks):
            raise ProtocolError(
                f"expected {len(chunks)} response records, got {len(records)}"
            )
        out: list[str] = []
        for chunk, record in zip(chunks, records):
            if not isinstance(record, dict) or "paragraphs" not in record:
                raise ProtocolError(f"response record missing paragraphs: {record!r}")
            got = record["paragraphs"]
            if not isinstance(got, list) or any(not isinstance(p, str) for p in got):
                raise ProtocolError("response paragraphs must be a list of strings")
            if len(got) != len(chunk):
                raise LengthMismatch(
                    f"record returned {len(got)} paragraphs for {len(chunk)} sent"
                )
            out.extend(got)
        return out


def translate_document(doc: Document, translator: Translator) -> Document:
    """Translate a document paragraph-wise, preserving the 1:1 structure.

    Responses are normalized with the same format-control stripping as
    source text. Paragraphs that translate to nothing stay as empty
    placeholders so indices keep lining up with the original.
    """
    request = TranslationRequest(doc.lang, tuple(p.text for p in doc.paragraphs))
    response = translator.translate(request)
    normalized = [
        " ".join(strip_format_controls(text).split()) for text in response.paragraphs
    ]
    translated = Document.from_paragraph_texts(doc.symbol, "en", normalized)
    translated.source_indices = list(doc.source_indices)
    return translated
