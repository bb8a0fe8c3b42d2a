"""Split symbol-position count tables into M words with a fixed symbol profile."""
import numpy as np

from lpdecode import Ring, decompose

ring = Ring.integers_mod(5)
k = (1, 0, 0, 1)          # one 1 and one 4 per word, so each word sums to zero
x = np.array([[2, 1, 0, 0],
              [0, 0, 0, 0],
              [0, 0, 0, 0],
              [0, 1, 1, 1]])
w = decompose(x, k, 3, ring)
for word, count in w.items():
    print(count, word)
print("tables reproduced:", bool((w.tables() == x).all()))
