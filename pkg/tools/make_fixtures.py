#!/usr/bin/env python3
"""Regenerate the bundled fixture corpora and their embedding files.

The fixtures are synthetic verse corpora with a planted topic structure:
each corpus is a sequence of numbered verses grouped into themed blocks,
plus a few off-theme "drift" verses that a density clusterer should mark
as noise.  Embeddings live on a unit sphere: each theme has a fixed
center; verse vectors are noisy copies of their theme center, theme words
sit near the same center, and function/filler words are placed at random.
The first ten themes are shared between the two corpora, so cross-corpus
comparison finds strong matches for those and weak ones elsewhere.

Everything is derived from fixed seeds; running this script twice
produces byte-identical files.  Outputs (committed to fixtures/):

    <name>.txt                     raw verse text with chapter.verse markers
    <name>.corpus.jsonl            ingested corpus, one document per line
    <name>.stats.json              corpus statistics
    <name>.docs.emb(.manifest.json)   document vectors, EMB1
    <name>.words.emb(.manifest.json)  vocabulary word vectors, EMB1
"""

from __future__ import annotations

import hashlib
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from versetopics.corpus import build_corpus, segment, stats_dict, write_corpus_jsonl  # noqa: E402
from versetopics.embedding import EmbeddingMatrix, write_embeddings, write_manifest  # noqa: E402
from versetopics.report import write_json  # noqa: E402

DIM = 64
ENCODER_ID = "fixture-enc64-v1"

# Theme vocabularies. A word belongs to exactly one theme; the first 16
# words of a theme are its core pool, the rest are variants used by the
# second corpus so shared themes differ in wording but not in meaning.
THEMES = {
    "stillness": [
        "stillness", "meditation", "breath", "silence", "calm", "posture",
        "attention", "awareness", "repose", "serenity", "focus", "quietude",
        "centering", "composure", "equipoise", "watchfulness",
        "tranquility", "settling", "hush", "poise", "steadiness", "restfulness",
    ],
    "river": [
        "river", "stream", "current", "water", "bank", "ford",
        "eddy", "rapids", "source", "delta", "ripple", "confluence",
        "channel", "shallows", "torrent", "brook",
        "riverbed", "tributary", "cascade", "millrace", "weir", "freshet",
    ],
    "mountain": [
        "mountain", "stone", "summit", "ridge", "cliff", "boulder",
        "slope", "granite", "peak", "crag", "ledge", "scree",
        "ascent", "foothill", "plateau", "bedrock",
        "outcrop", "tor", "massif", "saddle", "escarpment", "moraine",
    ],
    "harvest": [
        "harvest", "grain", "field", "furrow", "seed", "sickle",
        "barn", "threshing", "sheaf", "plough", "sowing", "granary",
        "wheat", "barley", "millet", "gleaning",
        "winnowing", "stubble", "haystack", "scythe", "crop", "tillage",
    ],
    "stars": [
        "stars", "sky", "constellation", "moon", "dawn", "horizon",
        "comet", "zenith", "twilight", "orbit", "eclipse", "meridian",
        "nebula", "polestar", "firmament", "planet",
        "starlight", "midheaven", "equinox", "solstice", "aurora", "zodiac",
    ],
    "fire": [
        "fire", "flame", "ember", "hearth", "spark", "kindling",
        "blaze", "ash", "torch", "smoke", "furnace", "charcoal",
        "beacon", "tinder", "pyre", "brazier",
        "bonfire", "cinder", "flint", "scorch", "smolder", "firelight",
    ],
    "wisdom": [
        "wisdom", "knowledge", "teacher", "student", "lesson", "insight",
        "question", "answer", "scripture", "learning", "discourse", "inquiry",
        "reason", "understanding", "instruction", "scholar",
        "sage", "teaching", "study", "doctrine", "contemplation", "discernment",
    ],
    "dream": [
        "dream", "sleep", "waking", "vision", "slumber", "midnight",
        "pillow", "dreamer", "reverie", "trance", "drowsiness", "awakening",
        "nightfall", "lucidity", "phantasm", "dormancy",
        "dreaming", "somnolence", "daybreak", "drowse", "nightwatch", "visionary",
    ],
    "journey": [
        "journey", "road", "traveler", "path", "crossroads", "milestone",
        "wayfarer", "compass", "bridge", "footstep", "lantern", "passage",
        "pilgrim", "caravan", "map", "threshold",
        "sojourn", "trail", "waypoint", "trek", "wandering", "signpost",
    ],
    "music": [
        "music", "song", "drum", "flute", "chord", "melody",
        "rhythm", "chant", "hymn", "harp", "cadence", "refrain",
        "harmony", "stanza", "chorus", "bell",
        "singing", "lute", "anthem", "descant", "timbre", "overtone",
    ],
    "healing": [
        "healing", "medicine", "wound", "salve", "fever", "remedy",
        "herb", "poultice", "physician", "balm", "tonic", "recovery",
        "bandage", "cure", "ailment", "convalescence",
        "healer", "tincture", "dressing", "mending", "apothecary", "restorative",
    ],
    "justice": [
        "justice", "law", "judge", "witness", "verdict", "scales",
        "oath", "testimony", "court", "decree", "statute", "plea",
        "judgment", "equity", "tribunal", "advocate",
        "juror", "edict", "arbiter", "covenant", "ordinance", "redress",
    ],
    "craft": [
        "craft", "work", "hammer", "anvil", "chisel", "loom",
        "forge", "workshop", "carpenter", "mason", "thread", "weaving",
        "artisan", "apprentice", "kiln", "lathe",
        "joinery", "smith", "awl", "adze", "spindle", "tanner",
    ],
    "ocean": [
        "ocean", "storm", "wave", "tide", "sail", "harbor",
        "anchor", "gale", "mast", "foam", "reef", "breaker",
        "seafarer", "swell", "lighthouse", "driftwood",
        "mariner", "squall", "billow", "spindrift", "keel", "headland",
    ],
    "garden": [
        "garden", "orchard", "blossom", "root", "branch", "fruit",
        "arbor", "vine", "petal", "sapling", "grove", "trellis",
        "gardener", "pruning", "mulch", "nectar",
        "bough", "graft", "bloom", "seedling", "hedge", "pollen",
    ],
    "winter": [
        "winter", "snow", "frost", "ice", "hail", "thaw",
        "blizzard", "icicle", "sleet", "drift", "chill", "rime",
        "snowfall", "firn", "glacier", "hoarfrost",
        "midwinter", "snowmelt", "coldness", "freeze", "flurry", "permafrost",
    ],
}

THEME_NAMES = list(THEMES)

# Words shared across all themes; dominate the unigram counts.
SHARED_WORDS = ["self", "mind", "action"]
SHARED_WEIGHTS = [0.5, 0.3, 0.2]

FILLER_WORDS = [
    "world", "truth", "heart", "spirit", "morning", "evening", "village",
    "elder", "city", "temple", "festival", "border", "shadow", "circle",
    "story", "memory", "promise", "burden", "honey", "salt", "copper",
    "linen", "basket", "valley", "pasture", "hollow", "market", "tower",
]

STOPWORD_SAMPLE = ["the", "of", "and", "in", "to", "a", "with", "for", "on", "from", "by", "at"]

CORPORA = {
    "meadow": {
        "seed": 101,
        "themes": THEME_NAMES[:14],
        "chapters": [39] * 16 + [38] * 2,  # 700 verses
        "target_tokens": 20299,
        "marker": "{c}.{v}",
    },
    "orchard": {
        "seed": 202,
        "themes": THEME_NAMES[:10] + ["garden", "winter"],
        "chapters": [50] * 12,  # 600 verses
        "target_tokens": 17400,
        "marker": "({c}.{v})",
    },
}

BLOCK = 50  # verses per theme block; the last verse of each block drifts off-theme


def theme_centers(theme_names: list[str]) -> dict[str, np.ndarray]:
    """One fixed unit vector per theme, shared across both corpora."""
    rng = np.random.default_rng(7)
    centers = {}
    for name in THEME_NAMES:
        v = rng.standard_normal(DIM)
        centers[name] = v / np.linalg.norm(v)
    return {name: centers[name] for name in theme_names}


def pool_for(corpus_name: str, theme: str) -> list[str]:
    words = THEMES[theme]
    if corpus_name == "meadow":
        return words[:16]
    # orchard: shares the meaning but swaps six words for variants
    return words[:10] + words[16:22]


def build_verse(rng: np.random.Generator, pool: list[str], n_tokens: int) -> list[str]:
    tokens = []
    for _ in range(n_tokens):
        roll = rng.random()
        if roll < 0.28:
            tokens.append(STOPWORD_SAMPLE[rng.integers(len(STOPWORD_SAMPLE))])
        elif roll < 0.80:
            tokens.append(pool[rng.integers(len(pool))])
        elif roll < 0.92:
            tokens.append(FILLER_WORDS[rng.integers(len(FILLER_WORDS))])
        else:
            tokens.append(SHARED_WORDS[rng.choice(len(SHARED_WORDS), p=SHARED_WEIGHTS)])
    return tokens


def build_drift_verse(rng: np.random.Generator, themes: list[str], n_tokens: int) -> list[str]:
    """Off-theme verse mixing many pools; its vector is random."""
    tokens = []
    for _ in range(n_tokens):
        if rng.random() < 0.3:
            tokens.append(STOPWORD_SAMPLE[rng.integers(len(STOPWORD_SAMPLE))])
        else:
            theme = themes[rng.integers(len(themes))]
            words = THEMES[theme]
            tokens.append(words[rng.integers(len(words))])
    return tokens


def dress(tokens: list[str], rng: np.random.Generator) -> str:
    """Add capitalization and light punctuation; token count is unchanged."""
    words = list(tokens)
    words[0] = words[0].capitalize()
    if len(words) > 8:
        comma_at = int(rng.integers(3, len(words) - 3))
        words[comma_at] = words[comma_at] + ","
    return " ".join(words) + "."


def generate_corpus(name: str, spec: dict, centers: dict[str, np.ndarray]):
    rng = np.random.default_rng(spec["seed"])
    themes = spec["themes"]
    n_verses = sum(spec["chapters"])
    assert n_verses == len(themes) * BLOCK

    verse_tokens: list[list[str]] = []
    verse_theme: list[str | None] = []  # None marks drift verses
    for block_index, theme in enumerate(themes):
        pool = pool_for(name, theme)
        for v in range(BLOCK):
            n_tokens = int(rng.integers(24, 34))
            if v == BLOCK - 1:
                verse_tokens.append(build_drift_verse(rng, themes, n_tokens))
                verse_theme.append(None)
            else:
                verse_tokens.append(build_verse(rng, pool, n_tokens))
                verse_theme.append(theme)

    # pad or trim one token per verse (cycling over on-theme verses) until
    # the total token count is exact; keeps every verse well under the
    # segmentation split threshold
    total = sum(len(t) for t in verse_tokens)
    delta = spec["target_tokens"] - total
    on_theme = [i for i, th in enumerate(verse_theme) if th is not None]
    cursor = 0
    while delta != 0:
        i = on_theme[cursor % len(on_theme)]
        cursor += 1
        if delta > 0:
            pool = pool_for(name, verse_theme[i])
            verse_tokens[i] = verse_tokens[i] + [pool[int(rng.integers(len(pool)))]]
            delta -= 1
        elif len(verse_tokens[i]) > 12:
            verse_tokens[i] = verse_tokens[i][:-1]
            delta += 1
    assert sum(len(t) for t in verse_tokens) == spec["target_tokens"]
    assert max(len(t) for t in verse_tokens) <= 100

    # lay verses out over chapters
    lines = []
    verse_iter = iter(range(n_verses))
    for chapter, size in enumerate(spec["chapters"], start=1):
        for v in range(1, size + 1):
            i = next(verse_iter)
            marker = spec["marker"].format(c=chapter, v=v)
            lines.append(f"{marker} {dress(verse_tokens[i], rng)}")
    raw_text = "\n".join(lines) + "\n"

    docs = segment(raw_text, "verse-numbered", source=name)
    assert len(docs) == n_verses, f"expected {n_verses} docs, got {len(docs)}"
    corpus = build_corpus(docs, name)
    assert corpus.stats.words == spec["target_tokens"]

    # document vectors: theme center + noise, normalized; drift verses random
    doc_rows = np.empty((n_verses, DIM))
    for i in range(n_verses):
        if verse_theme[i] is None:
            v = rng.standard_normal(DIM)
        else:
            v = centers[verse_theme[i]] + rng.standard_normal(DIM) * 0.20
        doc_rows[i] = v / np.linalg.norm(v)

    # word vectors for vocabulary tokens occurring >= 3 times
    word_of_theme = {}
    for theme in THEME_NAMES:
        for w in THEMES[theme]:
            word_of_theme[w] = theme
    mean_center = np.mean(list(centers.values()), axis=0)
    word_ids, word_rows = [], []
    for token in corpus.vocabulary:
        if corpus.occurrences(token) < 3:
            continue
        if token in word_of_theme and word_of_theme[token] in centers:
            v = centers[word_of_theme[token]] + rng.standard_normal(DIM) * 0.25
        elif token in SHARED_WORDS:
            v = mean_center + rng.standard_normal(DIM) * 0.25
        else:
            v = rng.standard_normal(DIM)
        word_ids.append(token)
        word_rows.append(v / np.linalg.norm(v))

    return raw_text, corpus, doc_rows, (word_ids, np.array(word_rows))


def write_fixture(out_dir: Path, name: str, raw_text, corpus, doc_rows, words):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{name}.txt").write_text(raw_text, encoding="utf-8")
    write_corpus_jsonl(corpus, out_dir / f"{name}.corpus.jsonl")
    write_json(stats_dict(corpus), out_dir / f"{name}.stats.json", schema_name="stats")

    docs_emb = EmbeddingMatrix(
        item_ids=[d.id for d in corpus.documents], dim=DIM, rows=doc_rows
    )
    docs_path = out_dir / f"{name}.docs.emb"
    write_embeddings(docs_emb, docs_path)
    digest = hashlib.sha256(docs_path.read_bytes()).hexdigest()[:16]
    write_manifest(docs_path, ENCODER_ID, DIM, digest)

    word_ids, word_rows = words
    words_emb = EmbeddingMatrix(item_ids=word_ids, dim=DIM, rows=word_rows)
    words_path = out_dir / f"{name}.words.emb"
    write_embeddings(words_emb, words_path)
    digest = hashlib.sha256(words_path.read_bytes()).hexdigest()[:16]
    write_manifest(words_path, ENCODER_ID, DIM, digest)

    stats = corpus.stats
    print(
        f"{name}: {stats.documents} docs, {stats.words} words, "
        f"avg {stats.avg_words:.2f}, {stats.verses} verses, "
        f"vocab {len(corpus.vocabulary)}, word vectors {len(word_ids)}"
    )


def main() -> None:
    out_dir = ROOT / "fixtures"
    for name, spec in CORPORA.items():
        centers = theme_centers(spec["themes"])
        raw_text, corpus, doc_rows, words = generate_corpus(name, spec, centers)
        write_fixture(out_dir, name, raw_text, corpus, doc_rows, words)


if __name__ == "__main__":
    main()
