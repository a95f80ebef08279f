/**
 * Minimal dense autograd: matrices with value and gradient buffers and
 * a tape of backward closures. Enough for an LSTM — matmul, add,
 * elementwise multiply, tanh, sigmoid, and embedding row lookup — with
 * no dependencies, so training is deterministic down to the last bit.
 */

import type { Rng } from "./rng.js";

export class Mat {
  readonly w: Float64Array;
  readonly dw: Float64Array;

  constructor(
    readonly rows: number,
    readonly cols: number,
  ) {
    this.w = new Float64Array(rows * cols);
    this.dw = new Float64Array(rows * cols);
  }

  static uniform(rows: number, cols: number, scale: number, rng: Rng): Mat {
    const m = new Mat(rows, cols);
    for (let i = 0; i < m.w.length; i++) {
      m.w[i] = rng.uniform(-scale, scale);
    }
    return m;
  }

  static fromValues(rows: number, cols: number, values: readonly number[]): Mat {
    const m = new Mat(rows, cols);
    if (values.length !== m.w.length) {
      throw new Error(`expected ${m.w.length} values, got ${values.length}`);
    }
    m.w.set(values);
    return m;
  }

  zeroGrad(): void {
    this.dw.fill(0);
  }
}

export class Tape {
  private readonly ops: Array<() => void> = [];

  constructor(readonly recording: boolean = true) {}

  backward(): void {
    for (let i = this.ops.length - 1; i >= 0; i--) {
      this.ops[i]!();
    }
  }

  private record(op: () => void): void {
    if (this.recording) this.ops.push(op);
  }

  /** Row `ix` of `m` as a column vector (embedding lookup). */
  rowPluck(m: Mat, ix: number): Mat {
    if (ix < 0 || ix >= m.rows) {
      throw new Error(`row ${ix} out of range for ${m.rows}x${m.cols}`);
    }
    const d = m.cols;
    const out = new Mat(d, 1);
    for (let i = 0; i < d; i++) out.w[i] = m.w[d * ix + i]!;
    this.record(() => {
      for (let i = 0; i < d; i++) m.dw[d * ix + i]! += out.dw[i]!;
    });
    return out;
  }

  mul(a: Mat, b: Mat): Mat {
    if (a.cols !== b.rows) {
      throw new Error(`matmul mismatch: ${a.rows}x${a.cols} * ${b.rows}x${b.cols}`);
    }
    const out = new Mat(a.rows, b.cols);
    for (let i = 0; i < a.rows; i++) {
      for (let j = 0; j < b.cols; j++) {
        let dot = 0;
        for (let k = 0; k < a.cols; k++) {
          dot += a.w[a.cols * i + k]! * b.w[b.cols * k + j]!;
        }
        out.w[b.cols * i + j] = dot;
      }
    }
    this.record(() => {
      for (let i = 0; i < a.rows; i++) {
        for (let j = 0; j < b.cols; j++) {
          const g = out.dw[b.cols * i + j]!;
          if (g === 0) continue;
          for (let k = 0; k < a.cols; k++) {
            a.dw[a.cols * i + k]! += b.w[b.cols * k + j]! * g;
            b.dw[b.cols * k + j]! += a.w[a.cols * i + k]! * g;
          }
        }
      }
    });
    return out;
  }

  add(a: Mat, b: Mat): Mat {
    if (a.w.length !== b.w.length) {
      throw new Error("add: size mismatch");
    }
    const out = new Mat(a.rows, a.cols);
    for (let i = 0; i < a.w.length; i++) out.w[i] = a.w[i]! + b.w[i]!;
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i]! += out.dw[i]!;
        b.dw[i]! += out.dw[i]!;
      }
    });
    return out;
  }

  eltmul(a: Mat, b: Mat): Mat {
    if (a.w.length !== b.w.length) {
      throw new Error("eltmul: size mismatch");
    }
    const out = new Mat(a.rows, a.cols);
    for (let i = 0; i < a.w.length; i++) out.w[i] = a.w[i]! * b.w[i]!;
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i]! += b.w[i]! * out.dw[i]!;
        b.dw[i]! += a.w[i]! * out.dw[i]!;
      }
    });
    return out;
  }

  tanh(a: Mat): Mat {
    const out = new Mat(a.rows, a.cols);
    for (let i = 0; i < a.w.length; i++) out.w[i] = Math.tanh(a.w[i]!);
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        const v = out.w[i]!;
        a.dw[i]! += (1 - v * v) * out.dw[i]!;
      }
    });
    return out;
  }

  sigmoid(a: Mat): Mat {
    const out = new Mat(a.rows, a.cols);
    for (let i = 0; i < a.w.length; i++) out.w[i] = 1 / (1 + Math.exp(-a.w[i]!));
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        const v = out.w[i]!;
        a.dw[i]! += v * (1 - v) * out.dw[i]!;
      }
    });
    return out;
  }
}
