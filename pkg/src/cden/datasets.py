"""Synthetic labeled image corpora for tests and demos."""

import colorsys
import csv
from pathlib import Path

import numpy as np
from PIL import Image

SIZE = 128

# one hue family per category, so the categories never share a color bin
CATEGORY_HUES = {"solid": 10.0, "stripes": 100.0, "dots": 220.0, "rings": 300.0}


def hsv_rgb(hue, sat, val):
    r, g, b = colorsys.hsv_to_rgb(hue / 360.0, sat, val)
    return np.array([round(r * 255), round(g * 255), round(b * 255)], dtype=np.uint8)


def _solid(i, rng, hue):
    img = np.empty((SIZE, SIZE, 3), dtype=np.uint8)
    img[:] = hsv_rgb(hue, 0.9, 0.9)
    side = 20 + 4 * i
    top, left = 20 + i, 30 + 2 * i
    img[top:top + side, left:left + side] = hsv_rgb(hue, 0.9, 0.3)
    return img


def _stripes(i, rng, hue):
    bright, dark = hsv_rgb(hue, 0.9, 0.9), hsv_rgb(hue, 0.9, 0.3)
    width, gap = 2 + i, 3
    rows = np.arange(SIZE) % (width + gap) < width
    img = np.where(rows[:, None, None], bright, dark)
    return np.broadcast_to(img, (SIZE, SIZE, 3)).astype(np.uint8)


def _dots(i, rng, hue):
    img = np.empty((SIZE, SIZE, 3), dtype=np.uint8)
    img[:] = hsv_rgb(hue, 0.9, 0.9)
    pale = hsv_rgb(hue, 0.3, 0.9)
    for _ in range(10 + 5 * i):
        r, c = rng.integers(2, SIZE - 4, size=2)
        img[r:r + 3, c:c + 3] = pale
    return img


def _rings(i, rng, hue):
    bright, dark = hsv_rgb(hue, 0.9, 0.9), hsv_rgb(hue, 0.9, 0.3)
    yy, xx = np.mgrid[:SIZE, :SIZE]
    dist = np.hypot(yy - SIZE / 2 + 0.5, xx - SIZE / 2 + 0.5)
    width, gap = 3 + i, 2
    mask = dist % (width + gap) < width
    return np.where(mask[:, :, None], bright, dark).astype(np.uint8)


_PAINTERS = {"solid": _solid, "stripes": _stripes, "dots": _dots, "rings": _rings}


def make_pattern_images(n_per_category=10, random_state=0):
    """Generate ``(images, labels)`` for four color-structure categories.

    Categories are solid fills with an inset block, horizontal stripes,
    scattered dots and concentric rings, each in its own hue family.
    Images are 128 x 128 RGB uint8 arrays.
    """
    rng = np.random.default_rng(random_state)
    images, labels = [], []
    for category, paint in _PAINTERS.items():
        for i in range(n_per_category):
            images.append(paint(i, rng, CATEGORY_HUES[category]))
            labels.append(category)
    return images, labels


def write_pattern_corpus(directory, n_per_category=10, random_state=0):
    """Write the pattern corpus as PNG files plus ``labels.csv``.

    Returns the path of the labels file. Image ids are ``<category>_<nn>.png``.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    images, labels = make_pattern_images(n_per_category, random_state)
    counters = {}
    rows = []
    for img, category in zip(images, labels):
        n = counters.get(category, 0)
        counters[category] = n + 1
        name = f"{category}_{n:02d}.png"
        Image.fromarray(img).save(directory / name)
        rows.append((name, category))
    labels_path = directory / "labels.csv"
    with open(labels_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "category"])
        writer.writerows(rows)
    return labels_path
