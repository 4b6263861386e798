# Copyright 2026 The topoloss Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates tests/data/natural/*.pgm from the scikit-image sample photographs.

Only photographs released as CC0 or into the public domain are used. Each one
is converted to 8-bit luminance; images at least 512 pixels wide give a
left-centre and a right-centre 256x256 crop, the others a single centre crop.
"""

import pathlib

import numpy as np
import skimage.color
import skimage.data

SOURCES = [
    "astronaut", "camera", "chelsea", "coffee", "coins", "grass", "gravel", "brick",
    "rocket", "retina", "hubble_deep_field", "clock", "cell", "immunohistochemistry",
]
SIDE = 256


def gray8(img):
    if img.ndim == 3:
        img = skimage.color.rgb2gray(img[..., :3])
        return np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    return img.astype(np.uint8)


def crops(img):
    h, w = img.shape
    y0 = (h - SIDE) // 2
    if w >= 2 * SIDE:
        xs = [w // 2 - SIDE, w // 2]
    else:
        xs = [(w - SIDE) // 2]
    return [img[y0:y0 + SIDE, x:x + SIDE] for x in xs]


def main():
    out = pathlib.Path(__file__).parent / "natural"
    out.mkdir(exist_ok=True)
    for name in SOURCES:
        for i, crop in enumerate(crops(gray8(getattr(skimage.data, name)()))):
            header = f"P5\n{SIDE} {SIDE}\n255\n".encode()
            (out / f"{name}_{i}.pgm").write_bytes(header + crop.tobytes())


if __name__ == "__main__":
    main()
