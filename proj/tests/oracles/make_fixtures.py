#!/usr/bin/env python3
"""Regenerates the binary/reference fixtures under tests/data.

The Lab reference table is produced with scikit-image (an implementation
unrelated to this codebase) and the image fixtures with Pillow, so the
C++ loaders and the color conversion are checked against independent
encoders. Output files are committed; rerun only when a fixture needs
to change.
"""

import os
import numpy as np
from PIL import Image
from skimage import color

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")


def lab_reference_table():
    rng = np.random.default_rng(20240817)
    rgb = rng.integers(0, 256, size=(1000, 3))
    lab = color.rgb2lab(rgb.astype(np.float64) / 255.0)
    path = os.path.join(DATA, "lab_reference.csv")
    with open(path, "w") as f:
        f.write("r,g,b,L,a,b\n")
        for (r, g, b), (L, A, B) in zip(rgb, lab):
            f.write(f"{r},{g},{b},{L:.10f},{A:.10f},{B:.10f}\n")
    print("wrote", path)


def image_fixtures():
    # 1x1 white PNG
    Image.new("RGB", (1, 1), (255, 255, 255)).save(
        os.path.join(DATA, "white_1x1.png"))

    # small RGB gradient JPEG, quality 95; dimensions asserted in tests
    w, h = 17, 11
    a = np.zeros((h, w, 3), np.uint8)
    for y in range(h):
        for x in range(w):
            a[y, x] = (15 * x, 23 * y, 40)
    img = Image.fromarray(a)
    img.save(os.path.join(DATA, "tiny_rgb.jpg"), quality=95)
    assert Image.open(os.path.join(DATA, "tiny_rgb.jpg")).size == (w, h)

    # solid-color JPEG (decode value checked with a loose tolerance)
    Image.new("RGB", (23, 9), (200, 50, 30)).save(
        os.path.join(DATA, "solid_23x9.jpg"), quality=95)

    # grayscale masks
    Image.new("L", (9, 7), 255).save(os.path.join(DATA, "mask_all255_9x7.png"))
    Image.new("L", (9, 7), 0).save(os.path.join(DATA, "mask_all0_9x7.png"))

    # {0,255} pattern mask: lesion where (x + 2*y) % 3 == 0
    pat = np.zeros((5, 8), np.uint8)
    for y in range(5):
        for x in range(8):
            if (x + 2 * y) % 3 == 0:
                pat[y, x] = 255
    Image.fromarray(pat, "L").save(os.path.join(DATA, "mask_pattern_8x5.png"))

    # anti-aliased-style mask with mid values around the 128 threshold
    mid = np.array([[0, 100, 127, 128], [130, 200, 255, 90]], np.uint8)
    Image.fromarray(mid, "L").save(os.path.join(DATA, "mask_mid_4x2.png"))

    # RGB png (invalid as a mask)
    Image.new("RGB", (6, 4), (10, 200, 30)).save(
        os.path.join(DATA, "rgb_6x4.png"))

    # palette png (invalid as a mask)
    Image.new("RGB", (6, 4), (255, 255, 255)).convert(
        "P", palette=Image.ADAPTIVE).save(os.path.join(DATA, "pal_6x4.png"))

    # 16-bit grayscale PNG; loader strips to high byte
    g16 = np.array([[0, 256, 32767, 32768], [65535, 513, 40000, 128]],
                   np.uint16)
    Image.fromarray(g16, "I;16").save(os.path.join(DATA, "gray16_4x2.png"))

    # 16-bit RGB PNG for the 8-bit rescale path of the image loader
    r16 = np.zeros((3, 5, 3), np.uint16)
    vals = [0, 255, 256, 32768, 65535]
    for x, v in enumerate(vals):
        r16[:, x] = (v, 65535 - v, v // 2)
    import struct, zlib

    def write_png16_rgb(path, arr):
        h2, w2, _ = arr.shape
        raw = b"".join(
            b"\x00" + arr[y].astype(">u2").tobytes() for y in range(h2))
        def chunk(tag, data):
            c = struct.pack(">I", len(data)) + tag + data
            return c + struct.pack(">I", zlib.crc32(tag + data))
        ihdr = struct.pack(">IIBBBBB", w2, h2, 16, 2, 0, 0, 0)
        png = (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr)
               + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b""))
        with open(path, "wb") as f:
            f.write(png)

    write_png16_rgb(os.path.join(DATA, "rgb16_5x3.png"), r16)
    # sanity: Pillow agrees on the geometry
    assert Image.open(os.path.join(DATA, "rgb16_5x3.png")).size == (5, 3)
    print("wrote image fixtures")


if __name__ == "__main__":
    os.makedirs(DATA, exist_ok=True)
    lab_reference_table()
    image_fixtures()
