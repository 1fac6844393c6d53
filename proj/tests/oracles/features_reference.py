"""Reference feature extractor, written from the schema table in features.hpp.

Regenerate the fixture with:
    python3 tests/oracles/features_reference.py > tests/fixtures/features_reference.json
Values are written unquantized; the C++ test allows half a quantum of slack.
"""
import json
import math

MASK = (1 << 64) - 1
TOKEN_SEED = 0x666C6F636B73696D
STRIP = set('.,!?;:"\'()[]')

NAMED = 20
SCALES = dict(words=64.0, followers=1e8, following=1e6, statuses=1e6, age=1e4, engagement=1e5)


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def fnv_hash(data, seed):
    h = 0xCBF29CE484222325 ^ splitmix64(seed)
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return splitmix64(h)


def tokens_of(text):
    out = []
    for raw in text.split():
        t = raw
        while t and t[0] in STRIP:
            t = t[1:]
        while t and t[-1] in STRIP:
            t = t[:-1]
        if t:
            out.append(t.lower())
    return out


def scaled(n, ref):
    return math.log1p(max(n, 0.0)) / math.log1p(ref)


def extract(c, t, dim):
    text = c["text"]
    tokens = tokens_of(text)
    letters = [ch for ch in text if ch.isascii() and ch.isalpha()]
    upper = sum(1 for ch in letters if ch.isupper())
    n_chars = len(text)
    digits = sum(1 for ch in text if ch.isascii() and ch.isdigit())
    fol = max(c["followers"], 0)
    fing = max(c["following"], 0)
    hour = t % 24
    x = [0.0] * dim
    x[0] = 1.0
    x[1] = n_chars / 280.0
    x[2] = scaled(len(tokens), SCALES["words"])
    x[3] = sum(1 for k in tokens if len(k) > 1 and k[0] == "#")
    x[4] = sum(1 for k in tokens if len(k) > 1 and k[0] == "@")
    x[5] = 1.0 if any(k.startswith(("http://", "https://", "www.")) for k in tokens) else 0.0
    x[6] = text.count("!")
    x[7] = text.count("?")
    x[8] = upper / len(letters) if letters else 0.0
    x[9] = digits / n_chars if n_chars else 0.0
    x[10] = scaled(fol, SCALES["followers"])
    x[11] = scaled(fing, SCALES["following"])
    x[12] = fol / (fol + fing) if fol + fing else 0.0
    x[13] = scaled(c["statuses"], SCALES["statuses"])
    x[14] = scaled(c["age"], SCALES["age"])
    x[15] = 1.0 if c["verified"] else 0.0
    x[16] = scaled(c["favorites"], SCALES["engagement"])
    x[17] = scaled(c["retweets"], SCALES["engagement"])
    x[18] = math.sin(2 * math.pi * hour / 24)
    x[19] = math.cos(2 * math.pi * hour / 24)
    buckets = dim - NAMED
    if buckets and tokens:
        unit = 1.0 / math.sqrt(len(tokens))
        for k in tokens:
            x[NAMED + fnv_hash(k.encode(), TOKEN_SEED) % buckets] += unit
    return x


CASES = [
    dict(text="", followers=0, following=0, statuses=0, age=0.0, verified=False,
         favorites=0, retweets=0, round=0, dim=87),
    dict(text="baseball #mlb #nl", followers=10, following=20, statuses=300, age=40.0,
         verified=False, favorites=1, retweets=0, round=5, dim=87),
    dict(text="@espn What a GAME tonight!! Final 7-3 #Baseball http://t.co/abc123 ?",
         followers=123456, following=789, statuses=45678, age=2000.0, verified=True,
         favorites=42, retweets=17, round=37, dim=87),
    dict(text="(Loaded bases.) \"walk-off\" win; again: www.example.com",
         followers=999, following=0, statuses=12, age=1.0, verified=False,
         favorites=0, retweets=3, round=23, dim=40),
    dict(text="no buckets here", followers=5, following=5, statuses=5, age=5.0,
         verified=False, favorites=5, retweets=5, round=12, dim=20),
]


def main():
    out = []
    for case in CASES:
        out.append(dict(case, expected=extract(case, case["round"], case["dim"])))
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
