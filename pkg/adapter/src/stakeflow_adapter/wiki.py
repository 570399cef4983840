"""Cache-first Wikipedia page lookup.

Pages live in a cache directory as one JSON file per page:
``{"title", "extract", "aliases": [...]}`` keyed by a slug of the title.
Offline mode (the default) serves only from the cache and reports misses;
online mode fills the cache from the public summary endpoint and never
refetches what it already has, so CI runs repeatably from checked-in pages.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

SUMMARY_ENDPOINT = "https://en.wikipedia.org/api/rest_v1/page/summary/{title}"


class FetchError(RuntimeError):
    pass


def slugify(title: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", title.lower()).strip("_")


@dataclass
class WikiPage:
    key: str
    title: str
    extract: str
    aliases: list[str] = field(default_factory=list)


class PageCache:
    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)

    def path_for(self, title: str) -> Path:
        return self.cache_dir / f"{slugify(title)}.json"

    def load(self, title: str) -> WikiPage | None:
        path = self.path_for(title)
        if not path.exists():
            return None
        raw = json.loads(path.read_text(encoding="utf-8"))
        return WikiPage(
            key=slugify(raw.get("title", title)),
            title=raw["title"],
            extract=raw.get("extract", ""),
            aliases=list(raw.get("aliases", [])),
        )

    def store(self, page: WikiPage) -> Path:
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(page.title)
        path.write_text(
            json.dumps(
                {"title": page.title, "extract": page.extract, "aliases": page.aliases},
                ensure_ascii=False,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        return path

    def all_pages(self) -> list[WikiPage]:
        pages = []
        for path in sorted(self.cache_dir.glob("*.json")):
            raw = json.loads(path.read_text(encoding="utf-8"))
            pages.append(
                WikiPage(
                    key=path.stem,
                    title=raw["title"],
                    extract=raw.get("extract", ""),
                    aliases=list(raw.get("aliases", [])),
                )
            )
        return pages


def fetch_page(title: str, cache: PageCache, online: bool = False) -> WikiPage:
    """Return a page from the cache, fetching online only when allowed."""
    cached = cache.load(title)
    if cached is not None:
        return cached
    if not online:
        raise FetchError(f"page '{title}' is not cached and online fetching is disabled")
    from urllib.request import Request, urlopen

    url = SUMMARY_ENDPOINT.format(title=title.replace(" ", "_"))
    try:
        with urlopen(Request(url, headers={"User-Agent": "stakeflow-adapter/0.1"}), timeout=20) as resp:
            raw = json.loads(resp.read().decode("utf-8"))
    except Exception as exc:
        raise FetchError(f"fetching '{title}' failed: {exc}") from exc
    page = WikiPage(
        key=slugify(raw.get("title", title)),
        title=raw.get("title", title),
        extract=raw.get("extract", ""),
    )
    cache.store(page)
    return page


def build_alias_index(pages: list[WikiPage]) -> dict[str, str]:
    """Normalized surface -> page key, from titles and declared aliases."""
    index: dict[str, str] = {}
    for page in pages:
        for alias in [page.title, *page.aliases]:
            index.setdefault(" ".join(alias.lower().split()), page.key)
    return index
