/** Closed-form least squares for the convergence-order fit. */

export interface LineFit {
  slope: number;
  intercept: number;
}

export function leastSquares(x: number[], y: number[]): LineFit {
  if (x.length !== y.length || x.length < 2) {
    throw new Error("need at least two matching points");
  }
  const n = x.length;
  let sx = 0;
  let sy = 0;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const denom = n * sxx - sx * sx;
  if (denom === 0) {
    throw new Error("degenerate abscissae");
  }
  const slope = (n * sxy - sx * sy) / denom;
  return { slope, intercept: (sy - slope * sx) / n };
}

/** Slope of log(error) against log(dt); this is the observed order. */
export function convergenceOrder(dt: number[], error: number[]): LineFit {
  for (const v of [...dt, ...error]) {
    if (!(v > 0)) {
      throw new Error("convergence fits need positive dt and error values");
    }
  }
  return leastSquares(dt.map(Math.log), error.map(Math.log));
}
