import type { SessionStore } from './state.js';
import type { DesignJson, ElementJson, GeometryJson } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

const KIND_FILL: Record<string, string> = {
  rect: '#9ecae1',
  ellipse: '#a1d99b',
  text: '#fdae6b',
  image: '#bcbddc',
  path: '#d9d9d9',
  group: 'none',
};

function styleFill(element: ElementJson): string {
  for (const part of element['style-digest'].split(';')) {
    const [key, value] = part.split('=');
    if (key === 'fill' && value && value !== 'none') return value;
  }
  return KIND_FILL[element.kind] ?? '#ccc';
}

/**
 * One design canvas rendered as inline SVG. Hit-testing and dragging work
 * on element bounding boxes; the output canvas forwards drags to the
 * store, the source canvas is selection-only.
 */
export class CanvasView {
  private svg: SVGSVGElement;

  constructor(
    private root: HTMLElement,
    private store: SessionStore,
    private which: 'source' | 'output',
  ) {
    this.svg = document.createElementNS(SVG_NS, 'svg') as SVGSVGElement;
    this.svg.classList.add('vlt-canvas', `vlt-canvas-${which}`);
    root.appendChild(this.svg);
    this.svg.addEventListener('pointerdown', this.onPointerDown);
  }

  private design(): DesignJson | null {
    const session = this.store.state.session;
    if (!session) return null;
    if (this.which === 'source') return session.b;
    return this.store.state.canvasToggle === 'output' ? session.aStar : session.a;
  }

  render(): void {
    const design = this.design();
    this.svg.textContent = '';
    if (!design) return;
    const w = design['canvas-width'];
    const h = design['canvas-height'];
    this.svg.setAttribute('viewBox', `0 0 ${w} ${h}`);
    this.svg.dataset.canvas = this.which;
    const frame = document.createElementNS(SVG_NS, 'rect');
    frame.setAttribute('width', String(w));
    frame.setAttribute('height', String(h));
    frame.setAttribute('class', 'canvas-frame');
    this.svg.appendChild(frame);

    const drag = this.store.state.pendingDrag;
    const byZ = [...design.elements].sort((a, b) => a.geometry.z - b.geometry.z);
    for (const element of byZ) {
      let geometry = element.geometry;
      if (this.which === 'output' && drag && drag.id === element.id) {
        geometry = drag.geometry;
      }
      this.svg.appendChild(this.renderElement(element, geometry));
    }
  }

  private renderElement(element: ElementJson, g: GeometryJson): SVGGElement {
    const group = document.createElementNS(SVG_NS, 'g') as SVGGElement;
    group.dataset.id = element.id;
    group.setAttribute('class', 'element');
    if (this.which === 'output' && this.store.state.selection.has(element.id)) {
      group.classList.add('selected');
    }
    let shape: SVGElement;
    if (element.kind === 'ellipse') {
      shape = document.createElementNS(SVG_NS, 'ellipse');
      shape.setAttribute('cx', String(g.x + g.w / 2));
      shape.setAttribute('cy', String(g.y + g.h / 2));
      shape.setAttribute('rx', String(g.w / 2));
      shape.setAttribute('ry', String(g.h / 2));
    } else {
      shape = document.createElementNS(SVG_NS, 'rect');
      shape.setAttribute('x', String(g.x));
      shape.setAttribute('y', String(g.y));
      shape.setAttribute('width', String(g.w));
      shape.setAttribute('height', String(g.h));
      if (element.kind === 'group') shape.setAttribute('stroke-dasharray', '4 2');
    }
    shape.setAttribute('fill', styleFill(element));
    group.appendChild(shape);
    if (element.kind === 'text' && element['text-content']) {
      const label = document.createElementNS(SVG_NS, 'text');
      label.setAttribute('x', String(g.x));
      label.setAttribute('y', String(g.y + g.h * 0.8));
      label.setAttribute('font-size', String(g.h * 0.8));
      label.textContent = element['text-content'];
      group.appendChild(label);
    }
    if (this.store.state.selection.has(element.id) && this.which === 'output') {
      const outline = document.createElementNS(SVG_NS, 'rect');
      outline.setAttribute('x', String(g.x));
      outline.setAttribute('y', String(g.y));
      outline.setAttribute('width', String(g.w));
      outline.setAttribute('height', String(g.h));
      outline.setAttribute('class', 'selection-outline');
      group.appendChild(outline);
    }
    return group;
  }

  /** Canvas units per CSS pixel, derived from the rendered size. */
  private unitsPerPixel(): number {
    const design = this.design();
    if (!design) return 1;
    const rect = this.svg.getBoundingClientRect();
    if (rect.width <= 0) return 1;
    return design['canvas-width'] / rect.width;
  }

  private onPointerDown = (event: PointerEvent): void => {
    const target = (event.target as Element | null)?.closest('g[data-id]');
    const id = target instanceof SVGGElement ? target.dataset.id : undefined;
    if (!id) {
      void this.store.setSelection([]);
      return;
    }
    if (event.shiftKey) {
      const current = new Set(this.store.state.selection);
      if (current.has(id)) current.delete(id);
      else current.add(id);
      void this.store.setSelection(current);
      return; // multi-select never starts a drag
    }
    void this.store.setSelection([id]);
    if (this.which !== 'output' || this.store.state.canvasToggle !== 'output') return;
    const element = this.design()?.elements.find((e) => e.id === id);
    if (!element) return;
    const scale = this.unitsPerPixel();
    const startX = event.clientX;
    const startY = event.clientY;
    const origin = element.geometry;
    this.store.beginDrag(id, origin);

    const onMove = (move: PointerEvent) => {
      this.store.updateDrag({
        ...origin,
        x: origin.x + (move.clientX - startX) * scale,
        y: origin.y + (move.clientY - startY) * scale,
      });
    };
    const onUp = () => {
      window.removeEventListener('pointermove', onMove);
      window.removeEventListener('pointerup', onUp);
      void this.store.commitDrag();
    };
    window.addEventListener('pointermove', onMove);
    window.addEventListener('pointerup', onUp);
  };
}
