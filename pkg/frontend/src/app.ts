import { CanvasView } from './canvasView.js';
import { RulePanel } from './rulePanel.js';
import type { SessionStore } from './state.js';

/**
 * Three-panel shell: source canvas, output canvas (with the A/A* toggle
 * and direct manipulation), and the live rule customization panel.
 */
export class App {
  private sourceView!: CanvasView;
  private outputView!: CanvasView;
  private panel!: RulePanel;
  private noticeBox!: HTMLElement;
  private toggleButton!: HTMLButtonElement;

  constructor(
    private root: HTMLElement,
    private store: SessionStore,
  ) {}

  mount(): void {
    this.root.innerHTML = `
      <div class="toolbar">
        <button data-action="global-copy">Global copy</button>
        <button data-action="element-copy">Element copy</button>
        <button data-action="h-off">H-Off</button>
        <button data-action="v-off">V-Off</button>
        <button data-action="optimize">Optimize</button>
        <button data-action="undo">Undo</button>
        <button data-action="toggle">Show A</button>
        <a data-action="export" target="_blank">Export SVG</a>
      </div>
      <div class="workspace">
        <section class="panel source-panel"><h2>Source (B)</h2><div class="canvas-host"></div></section>
        <section class="panel output-panel"><h2>Output (A*)</h2><div class="canvas-host"></div></section>
        <aside class="panel rule-panel"></aside>
      </div>
      <div class="notice" hidden></div>
    `;
    const hosts = this.root.querySelectorAll<HTMLElement>('.canvas-host');
    this.sourceView = new CanvasView(hosts[0]!, this.store, 'source');
    this.outputView = new CanvasView(hosts[1]!, this.store, 'output');
    this.panel = new RulePanel(this.root.querySelector<HTMLElement>('.rule-panel')!, this.store);
    this.noticeBox = this.root.querySelector<HTMLElement>('.notice')!;
    this.toggleButton = this.root.querySelector<HTMLButtonElement>('[data-action="toggle"]')!;

    this.root.querySelector('[data-action="global-copy"]')!.addEventListener('click', () => {
      void this.store.dispatch({ type: 'global-copy' });
    });
    this.root.querySelector('[data-action="element-copy"]')!.addEventListener('click', () => {
      void this.store.dispatch({ type: 'element-copy', ids: [...this.store.state.selection] });
    });
    this.root.querySelector('[data-action="h-off"]')!.addEventListener('click', () => {
      void this.store.dispatch({
        type: 'conform-offset',
        ids: [...this.store.state.selection],
        axis: 'horizontal',
      });
    });
    this.root.querySelector('[data-action="v-off"]')!.addEventListener('click', () => {
      void this.store.dispatch({
        type: 'conform-offset',
        ids: [...this.store.state.selection],
        axis: 'vertical',
      });
    });
    this.root.querySelector('[data-action="optimize"]')!.addEventListener('click', () => {
      const selection = [...this.store.state.selection];
      void this.store.dispatch({
        type: 'optimize',
        budget: 200,
        seed: 0,
        selection: selection.length ? selection : undefined,
      });
    });
    this.root.querySelector('[data-action="undo"]')!.addEventListener('click', () => {
      void this.store.dispatch({ type: 'undo' });
    });
    this.toggleButton.addEventListener('click', () => this.store.toggleCanvas());

    this.store.subscribe(() => this.render());
    this.render();
  }

  render(): void {
    const { session, canvasToggle, notice } = this.store.state;
    this.sourceView.render();
    this.outputView.render();
    this.panel.render();
    this.toggleButton.textContent = canvasToggle === 'output' ? 'Show A' : 'Show A*';
    const header = this.root.querySelector('.output-panel h2');
    if (header) header.textContent = canvasToggle === 'output' ? 'Output (A*)' : 'Target (A)';
    const link = this.root.querySelector<HTMLAnchorElement>('[data-action="export"]');
    if (link && session) link.href = this.store.client.exportUrl(session.id);
    this.noticeBox.hidden = notice === null;
    this.noticeBox.textContent = notice ?? '';
  }
}
