/** Optional PNG rasterization via @resvg/resvg-js.  The dependency is
 * optional (native binary); when it is absent we fail with a named error so
 * callers can fall back to SVG output. */

export class PngUnavailableError extends Error {
  constructor(cause: string) {
    super(
      `PNG output needs the optional @resvg/resvg-js dependency (${cause}); ` +
        "re-run with --format svg or install the optional dependency",
    );
    this.name = "PngUnavailableError";
  }
}

export async function svgToPng(svg: string): Promise<Buffer> {
  let resvg: typeof import("@resvg/resvg-js");
  try {
    resvg = await import("@resvg/resvg-js");
  } catch (err) {
    throw new PngUnavailableError(err instanceof Error ? err.message : String(err));
  }
  const rendered = new resvg.Resvg(svg, { fitTo: { mode: "zoom", value: 2 } });
  return rendered.render().asPng();
}
