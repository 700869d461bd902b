# Writes third_party.txt with Python's own float formatting ("%.6f"),
# independently of the Rust writer.
import random

random.seed(42)
base = {
    "revenue": [1, 0, 0, 0], "sales": [1, 0.1, 0, 0], "income": [0.8, 0.3, 0, 0], "profit": [0.9, 0.2, 0.1, 0],
    "debt": [0, 1, 0, 0], "loans": [0, 0.9, 0.2, 0], "bonds": [0.1, 0.8, 0.3, 0], "equity": [0, 0, 1, 0],
    "stock": [0, 0.1, 0.9, 0.1], "shares": [0, 0, 0.95, 0.2], "risk": [0, 0, 0, 1], "recession": [0.1, 0, 0, 0.9],
}
with open("third_party.txt", "w") as f:
    f.write("%d %d\n" % (len(base), 4))
    for w, v in base.items():
        f.write(w + " " + " ".join("%.6f" % (x + random.uniform(-0.01, 0.01)) for x in v) + "\n")
