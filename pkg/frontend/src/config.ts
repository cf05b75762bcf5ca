/**
 * Flat `key = value` spec files, same format the experiment CLI reads:
 * `#` starts a comment, keys are dotted lowercase words, duplicates and
 * unknown keys are rejected.
 */

import { SpecError } from "./errors";

const KEY_RE = /^[a-z][a-z0-9_]*(\.[a-z][a-z0-9_]*)*$/;

export function parseSpecText(text: string): Map<string, string> {
  const out = new Map<string, string>();
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const stripped = lines[i].split("#", 1)[0].trim();
    if (stripped === "") continue;
    const eq = stripped.indexOf("=");
    if (eq < 0) {
      throw new SpecError(`line ${i + 1}: expected 'key = value'`);
    }
    const key = stripped.slice(0, eq).trim();
    const value = stripped.slice(eq + 1).trim();
    if (!KEY_RE.test(key)) {
      throw new SpecError(`line ${i + 1}: bad key '${key}'`);
    }
    if (value === "") {
      throw new SpecError(`line ${i + 1}: empty value for '${key}'`);
    }
    if (out.has(key)) {
      throw new SpecError(`line ${i + 1}: duplicate key '${key}'`);
    }
    out.set(key, value);
  }
  return out;
}

export interface NumberBounds {
  lo?: number;
  hi?: number;
  loOpen?: boolean;
}

/** Typed accessors over parsed keys; tracks what was consumed so the
 * leftovers can be rejected by name. */
export class SpecView {
  private seen = new Set<string>();

  constructor(private entries: Map<string, string>) {}

  private fetch(key: string): string | undefined {
    const v = this.entries.get(key);
    if (v !== undefined) this.seen.add(key);
    return v;
  }

  getString(key: string, fallback?: string, choices?: string[]): string {
    const raw = this.fetch(key);
    if (raw === undefined) {
      if (fallback === undefined) {
        throw new SpecError(`missing required key '${key}'`);
      }
      return fallback;
    }
    if (choices && !choices.includes(raw)) {
      throw new SpecError(
        `key '${key}': '${raw}' is not one of ${choices.join(", ")}`
      );
    }
    return raw;
  }

  getNumber(key: string, fallback?: number, bounds: NumberBounds = {}): number {
    const raw = this.fetch(key);
    if (raw === undefined) {
      if (fallback === undefined) {
        throw new SpecError(`missing required key '${key}'`);
      }
      return fallback;
    }
    const v = Number(raw);
    if (!Number.isFinite(v)) {
      throw new SpecError(`key '${key}': '${raw}' is not a number`);
    }
    const { lo, hi, loOpen } = bounds;
    if (lo !== undefined && (loOpen ? v <= lo : v < lo)) {
      throw new SpecError(`key '${key}': ${v} is below ${lo}`);
    }
    if (hi !== undefined && v > hi) {
      throw new SpecError(`key '${key}': ${v} is above ${hi}`);
    }
    return v;
  }

  getInt(key: string, fallback?: number, bounds: NumberBounds = {}): number {
    const v = this.getNumber(key, fallback, bounds);
    if (!Number.isInteger(v)) {
      throw new SpecError(`key '${key}': ${v} is not an integer`);
    }
    return v;
  }

  has(key: string): boolean {
    return this.entries.has(key);
  }

  /** Call after all reads: any never-consumed key is a typo. */
  rejectUnknown(): void {
    for (const key of this.entries.keys()) {
      if (!this.seen.has(key)) {
        throw new SpecError(`unknown key '${key}'`);
      }
    }
  }
}
