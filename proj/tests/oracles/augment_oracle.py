"""Direct-formula reference for fog, gamma and sun flare on a small pattern."""
import math

W, H = 6, 5


def pattern():
    return [[[(37 * (y * W + x) + 11 * c) % 256 for c in range(3)] for x in range(W)] for y in range(H)]


def rnd(v):
    return min(255, max(0, math.floor(v + 0.5)))


def fog(img, coef, alpha=0.5, color=220):
    a = alpha * coef
    blend = [[[rnd((1 - a) * p[c] + a * color) for c in range(3)] for p in row] for row in img]
    sigma = 2 * coef
    r = math.ceil(2 * sigma)
    k = [math.exp(-(i * i) / (2 * sigma * sigma)) for i in range(-r, r + 1)]
    s = sum(k)
    k = [v / s for v in k]
    tmp = [[[sum(k[i + r] * blend[y][min(max(x + i, 0), W - 1)][c] for i in range(-r, r + 1)) for c in range(3)]
            for x in range(W)] for y in range(H)]
    return [[[rnd(sum(k[i + r] * tmp[min(max(y + i, 0), H - 1)][x][c] for i in range(-r, r + 1))) for c in range(3)]
             for x in range(W)] for y in range(H)]


def flat(img):
    return [v for row in img for p in row for v in p]


print("fog(0.6):", flat(fog(pattern(), 0.6)))
print("gamma 0.8:", [rnd(255 * (v / 255) ** 0.8) for v in (0, 1, 64, 128, 200, 255)])
print("gamma 1.2:", [rnd(255 * (v / 255) ** 1.2) for v in (0, 1, 64, 128, 200, 255)])
# Flare at (2, 1) with radius 0.3 * 5 = 1.5, intensity 0.6.
img = pattern()
out = []
for y in range(H):
    for x in range(W):
        d = math.hypot(x - 2, y - 1)
        for c in range(3):
            v = img[y][x][c]
            out.append(v + math.floor((255 - v) * 0.6 * (1 - d / 1.5) + 0.5) if d <= 1.5 else v)
print("flare(2,1):", out)
