"""Export the IRIS table and the 8x8 digits images bundled with scikit-learn.

IRIS is written in the classic UCI layout (four features, then the class
name). Digits are written as IDX files (images 0x00000803, labels 0x00000801)
with the 0..16 intensities rescaled to 0..255.
"""
import gzip
import os
import struct
import sys

import numpy as np
import sklearn

NAMES = ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]


def main(out_dir):
    src = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")
    os.makedirs(out_dir, exist_ok=True)

    with open(os.path.join(src, "iris.csv")) as f:
        rows = f.read().strip().splitlines()[1:]
    with open(os.path.join(out_dir, "iris.csv"), "w") as f:
        for row in rows:
            *features, label = row.split(",")
            f.write(",".join(features) + "," + NAMES[int(label)] + "\n")

    with gzip.open(os.path.join(src, "digits.csv.gz")) as f:
        table = np.loadtxt(f, delimiter=",")
    pixels = np.rint(table[:, :64] * 255.0 / 16.0).astype(np.uint8)
    labels = table[:, 64].astype(np.uint8)
    count = pixels.shape[0]
    with open(os.path.join(out_dir, "digits-images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, count, 8, 8))
        f.write(pixels.tobytes())
    with open(os.path.join(out_dir, "digits-labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, count))
        f.write(labels.tobytes())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
