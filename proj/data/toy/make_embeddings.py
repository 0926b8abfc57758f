"""Writes embeddings.txt: clustered synthetic vectors in word2vec text format."""
import random

DIM = 16
CLUSTERS = {
    "film": ["movie", "movies", "film", "films", "filming", "trilogy", "cinema", "directed", "make", "made"],
    "batman": ["batman", "bruce", "wayne", "gotham", "batmobile", "tumbler", "joker", "catwoman", "knight"],
    "alfred": ["alfred", "butler", "pennyworth", "household", "loyal"],
    "acting": ["played", "role", "performance", "actor", "character", "starred"],
    "director": ["nolan", "burton", "hitchcock"],
    "animal": ["bats", "mammals", "nocturnal", "species", "insects", "echolocation"],
    "police": ["police", "commissioner", "gordon", "officers"],
    "music": ["score", "music", "composed"],
    "award": ["award", "awards", "academy", "praised", "success"],
}

rng = random.Random(20201015)
rows = []
for words in CLUSTERS.values():
    centre = [rng.gauss(0, 1) for _ in range(DIM)]
    for w in words:
        rows.append((w, [c + rng.gauss(0, 0.3) for c in centre]))

with open("embeddings.txt", "w") as f:
    f.write(f"{len(rows)} {DIM}\n")
    for w, v in rows:
        f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")
