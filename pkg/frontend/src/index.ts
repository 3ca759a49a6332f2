export { ArtifactError, readCsv, readReport, column } from "./data.js";
export type { Table } from "./data.js";
export {
  FIGURE_KINDS,
  buildFigure,
  loadInputs,
  printed,
  renderFigure,
} from "./figures.js";
export type { FigureKind, Inputs } from "./figures.js";
export { renderSvg, fmt } from "./svg.js";
export type { PlotSpec, Series, Annotation } from "./svg.js";
export { PngUnavailableError, svgToPng } from "./png.js";
