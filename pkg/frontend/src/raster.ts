/**
 * Tiny software rasterizer: RGB byte buffer, Bresenham lines with
 * optional thickness, filled discs, and a 5x7 bitmap font. No canvas,
 * no native dependencies, so output is identical on every platform.
 */

export type Rgb = readonly [number, number, number];

export class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number) {
    this.data = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, rgb: Rgb): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    this.data[i] = rgb[0];
    this.data[i + 1] = rgb[1];
    this.data[i + 2] = rgb[2];
  }

  rect(x: number, y: number, w: number, h: number, rgb: Rgb): void {
    for (let yy = y; yy < y + h; yy++) {
      for (let xx = x; xx < x + w; xx++) this.set(xx, yy, rgb);
    }
  }

  disc(cx: number, cy: number, r: number, rgb: Rgb): void {
    for (let yy = cy - r; yy <= cy + r; yy++) {
      for (let xx = cx - r; xx <= cx + r; xx++) {
        if ((xx - cx) ** 2 + (yy - cy) ** 2 <= r * r) this.set(xx, yy, rgb);
      }
    }
  }

  line(
    x0: number, y0: number, x1: number, y1: number,
    rgb: Rgb, thickness = 1
  ): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    const r = Math.max(0, Math.floor(thickness / 2));
    for (;;) {
      if (r === 0) this.set(xa, ya, rgb);
      else this.disc(xa, ya, r, rgb);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }
}

// 5x7 glyphs; lowercase renders with the uppercase shape
const GLYPHS: Record<string, string[]> = {
  " ": ["     ", "     ", "     ", "     ", "     ", "     ", "     "],
  "0": [" XXX ", "X   X", "X  XX", "X X X", "XX  X", "X   X", " XXX "],
  "1": ["  X  ", " XX  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  "2": [" XXX ", "X   X", "    X", "   X ", "  X  ", " X   ", "XXXXX"],
  "3": [" XXX ", "X   X", "    X", "  XX ", "    X", "X   X", " XXX "],
  "4": ["   X ", "  XX ", " X X ", "X  X ", "XXXXX", "   X ", "   X "],
  "5": ["XXXXX", "X    ", "XXXX ", "    X", "    X", "X   X", " XXX "],
  "6": [" XXX ", "X    ", "X    ", "XXXX ", "X   X", "X   X", " XXX "],
  "7": ["XXXXX", "    X", "   X ", "  X  ", " X   ", " X   ", " X   "],
  "8": [" XXX ", "X   X", "X   X", " XXX ", "X   X", "X   X", " XXX "],
  "9": [" XXX ", "X   X", "X   X", " XXXX", "    X", "    X", " XXX "],
  A: [" XXX ", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"],
  B: ["XXXX ", "X   X", "X   X", "XXXX ", "X   X", "X   X", "XXXX "],
  C: [" XXX ", "X   X", "X    ", "X    ", "X    ", "X   X", " XXX "],
  D: ["XXXX ", "X   X", "X   X", "X   X", "X   X", "X   X", "XXXX "],
  E: ["XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "XXXXX"],
  F: ["XXXXX", "X    ", "X    ", "XXXX ", "X    ", "X    ", "X    "],
  G: [" XXX ", "X   X", "X    ", "X XXX", "X   X", "X   X", " XXXX"],
  H: ["X   X", "X   X", "X   X", "XXXXX", "X   X", "X   X", "X   X"],
  I: [" XXX ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", " XXX "],
  J: ["  XXX", "   X ", "   X ", "   X ", "   X ", "X  X ", " XX  "],
  K: ["X   X", "X  X ", "X X  ", "XX   ", "X X  ", "X  X ", "X   X"],
  L: ["X    ", "X    ", "X    ", "X    ", "X    ", "X    ", "XXXXX"],
  M: ["X   X", "XX XX", "X X X", "X X X", "X   X", "X   X", "X   X"],
  N: ["X   X", "XX  X", "X X X", "X  XX", "X   X", "X   X", "X   X"],
  O: [" XXX ", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "],
  P: ["XXXX ", "X   X", "X   X", "XXXX ", "X    ", "X    ", "X    "],
  Q: [" XXX ", "X   X", "X   X", "X   X", "X X X", "X  X ", " XX X"],
  R: ["XXXX ", "X   X", "X   X", "XXXX ", "X X  ", "X  X ", "X   X"],
  S: [" XXXX", "X    ", "X    ", " XXX ", "    X", "    X", "XXXX "],
  T: ["XXXXX", "  X  ", "  X  ", "  X  ", "  X  ", "  X  ", "  X  "],
  U: ["X   X", "X   X", "X   X", "X   X", "X   X", "X   X", " XXX "],
  V: ["X   X", "X   X", "X   X", "X   X", "X   X", " X X ", "  X  "],
  W: ["X   X", "X   X", "X   X", "X X X", "X X X", "XX XX", "X   X"],
  X: ["X   X", "X   X", " X X ", "  X  ", " X X ", "X   X", "X   X"],
  Y: ["X   X", "X   X", " X X ", "  X  ", "  X  ", "  X  ", "  X  "],
  Z: ["XXXXX", "    X", "   X ", "  X  ", " X   ", "X    ", "XXXXX"],
  ".": ["     ", "     ", "     ", "     ", "     ", " XX  ", " XX  "],
  ",": ["     ", "     ", "     ", "     ", " XX  ", "  X  ", " X   "],
  "-": ["     ", "     ", "     ", " XXX ", "     ", "     ", "     "],
  "+": ["     ", "  X  ", "  X  ", "XXXXX", "  X  ", "  X  ", "     "],
  "=": ["     ", "     ", "XXXXX", "     ", "XXXXX", "     ", "     "],
  "_": ["     ", "     ", "     ", "     ", "     ", "     ", "XXXXX"],
  "(": ["   X ", "  X  ", " X   ", " X   ", " X   ", "  X  ", "   X "],
  ")": [" X   ", "  X  ", "   X ", "   X ", "   X ", "  X  ", " X   "],
  ":": ["     ", " XX  ", " XX  ", "     ", " XX  ", " XX  ", "     "],
  "/": ["    X", "    X", "   X ", "  X  ", " X   ", "X    ", "X    "],
  "*": ["     ", "X X X", " XXX ", "XXXXX", " XXX ", "X X X", "     "],
};

const UNKNOWN = ["XXXXX", "X   X", "X   X", "X   X", "X   X", "X   X", "XXXXX"];

export function drawText(
  raster: Raster, x: number, y: number, text: string, rgb: Rgb, scale = 1
): void {
  let cx = Math.round(x);
  const cy = Math.round(y);
  for (const ch of text) {
    const glyph = GLYPHS[ch] ?? GLYPHS[ch.toUpperCase()] ?? UNKNOWN;
    for (let row = 0; row < 7; row++) {
      for (let col = 0; col < 5; col++) {
        if (glyph[row][col] !== " ") {
          raster.rect(cx + col * scale, cy + row * scale, scale, scale, rgb);
        }
      }
    }
    cx += 6 * scale;
  }
}

export function textWidth(text: string, scale = 1): number {
  return text.length * 6 * scale - scale;
}
