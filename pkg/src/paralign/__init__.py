"""paralign: paragraph-level bilingual document alignment toolkit."""

__version__ = "0.1.0"

from .textnorm import Document, Paragraph, Token  # noqa: F401
