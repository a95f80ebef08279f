/**
 * Deterministic random number generator (splitmix64-style core on
 * BigInt state). Everything stochastic in this package — weight
 * initialization, epoch shuffling, template sampling — draws from one
 * of these so a fixed seed reproduces runs bit-for-bit.
 */

const MASK64 = (1n << 64n) - 1n;

export class Rng {
  private state: bigint;

  constructor(seed: number) {
    if (!Number.isInteger(seed)) {
      throw new Error(`seed must be an integer, got ${seed}`);
    }
    this.state = BigInt.asUintN(64, BigInt(seed));
  }

  /** Next raw 64-bit value. */
  private next64(): bigint {
    this.state = (this.state + 0x9e3779b97f4a7c15n) & MASK64;
    let z = this.state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
    return z ^ (z >> 31n);
  }

  /** Uniform double in [0, 1) with 53 bits of precision. */
  float(): number {
    return Number(this.next64() >> 11n) / 2 ** 53;
  }

  /** Uniform double in [lo, hi). */
  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.float();
  }

  /** Uniform integer in [0, n). */
  int(n: number): number {
    if (!Number.isInteger(n) || n <= 0) {
      throw new Error(`int() needs a positive bound, got ${n}`);
    }
    return Number(this.next64() % BigInt(n));
  }

  /** Uniform choice from a non-empty array. */
  choice<T>(items: readonly T[]): T {
    if (items.length === 0) {
      throw new Error("choice() on empty array");
    }
    return items[this.int(items.length)]!;
  }

  /** In-place Fisher-Yates shuffle. */
  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = items[i]!;
      items[i] = items[j]!;
      items[j] = tmp;
    }
  }
}
