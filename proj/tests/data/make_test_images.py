#!/usr/bin/env python3
"""Regenerates the committed test images.

Natural images come from the scikit-image and scikit-learn bundled samples,
converted to grayscale binary PGM (maxval 255). The tiny/ images are small
crops used by the fast CSV-shape tests.
"""

import os

import numpy as np


def write_pgm(path, arr):
    arr = np.asarray(arr, dtype=np.uint8)
    h, w = arr.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(arr.tobytes())
    print(f"{path}: {w}x{h}")


def to_gray(rgb):
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.round(y), 0, 255).astype(np.uint8)


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    os.makedirs(os.path.join(here, "tiny"), exist_ok=True)

    from skimage import data as skdata
    from sklearn.datasets import load_sample_image

    camera = skdata.camera()
    moon = skdata.moon()
    astronaut = to_gray(skdata.astronaut().astype(np.float64))
    china = to_gray(load_sample_image("china.jpg").astype(np.float64))

    write_pgm(os.path.join(here, "camera.pgm"), camera)
    write_pgm(os.path.join(here, "moon.pgm"), moon)
    write_pgm(os.path.join(here, "astronaut.pgm"), astronaut)
    write_pgm(os.path.join(here, "china.pgm"), china)

    # tiny crops for the curve CSV tests
    write_pgm(os.path.join(here, "tiny", "t1.pgm"), camera[200:240, 200:240])
    write_pgm(os.path.join(here, "tiny", "t2.pgm"), moon[100:140, 300:340])


if __name__ == "__main__":
    main()
