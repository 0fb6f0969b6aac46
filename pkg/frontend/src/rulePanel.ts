import type { SessionStore } from './state.js';
import type { GeometryProp, RuleJson } from './types.js';
import { GEOMETRY_PROPS } from './types.js';

function ruleLabel(rule: RuleJson): string {
  const params = rule.params;
  if (typeof params.mode === 'string') return `${rule.variant} (${params.mode})`;
  if (typeof params.axis === 'string') {
    const gap = typeof params.gap === 'number' ? ` gap ${params.gap.toFixed(1)}` : '';
    return `${rule.variant} (${params.axis}${gap})`;
  }
  if (typeof params.value === 'number') return `${rule.variant} (${params.value.toFixed(1)})`;
  return rule.variant;
}

/**
 * Live rule list plus the per-property inspector. Everything it shows
 * comes from the last gateway response; every button dispatches a
 * command and waits for the authoritative refresh.
 */
export class RulePanel {
  constructor(
    private root: HTMLElement,
    private store: SessionStore,
  ) {}

  render(): void {
    const { panelRules, selection, session } = this.store.state;
    this.root.textContent = '';
    this.root.appendChild(this.inspector());

    const heading = document.createElement('h3');
    heading.textContent = selection.size
      ? `Rules for selection (${selection.size})`
      : 'All layout rules';
    this.root.appendChild(heading);

    const list = document.createElement('ul');
    list.className = 'rule-list';
    for (const rule of panelRules) {
      list.appendChild(this.ruleRow(rule));
    }
    this.root.appendChild(list);

    if (session) {
      const reward = document.createElement('div');
      reward.className = 'reward';
      const r = session.reward;
      reward.textContent =
        `reward ${r.total.toFixed(3)} = rule ${r['r-rule'].toFixed(3)}` +
        ` + off ${r['r-off'].toFixed(3)} + con ${r['r-con'].toFixed(3)}`;
      this.root.appendChild(reward);
    }
  }

  private ruleRow(rule: RuleJson): HTMLLIElement {
    const item = document.createElement('li');
    item.className = 'rule';
    item.dataset.ruleId = rule.id;

    const label = document.createElement('span');
    label.className = 'rule-label';
    label.textContent = ruleLabel(rule);
    item.appendChild(label);

    const members = document.createElement('span');
    members.className = 'rule-members';
    for (const member of rule.members) {
      const chip = document.createElement('span');
      chip.className = 'chip';
      chip.textContent = member;
      chip.addEventListener('click', () => void this.store.setSelection([member]));
      members.appendChild(chip);
    }
    item.appendChild(members);

    const add = document.createElement('button');
    add.className = 'rule-add';
    add.textContent = '+';
    add.title = 'apply this rule to the selected elements as well';
    add.addEventListener('click', () => {
      const extras = [...this.store.state.selection].filter((id) => !rule.members.includes(id));
      void this.store.dispatch({ type: 'enforce-rule', ruleId: rule.id, extraMembers: extras });
    });
    item.appendChild(add);

    const weight = document.createElement('input');
    weight.className = 'rule-weight';
    weight.type = 'number';
    weight.step = '0.1';
    weight.min = '0';
    weight.value = String(rule.weight);
    weight.addEventListener('change', () => {
      void this.store.dispatch({ type: 'set-weights', rules: { [rule.id]: Number(weight.value) } });
    });
    item.appendChild(weight);

    const apply = document.createElement('button');
    apply.className = 'rule-apply';
    apply.textContent = 'apply';
    apply.addEventListener('click', () => {
      void this.store.dispatch({ type: 'enforce-rule', ruleId: rule.id });
    });
    item.appendChild(apply);
    return item;
  }

  /** Property grid for the selection, grouping alike values per property. */
  private inspector(): HTMLElement {
    const box = document.createElement('div');
    box.className = 'inspector';
    const session = this.store.state.session;
    const ids = [...this.store.state.selection];
    if (!session || ids.length === 0) return box;
    const elements = session.aStar.elements.filter((e) => ids.includes(e.id));
    for (const prop of GEOMETRY_PROPS) {
      const row = document.createElement('div');
      row.className = 'inspector-row';
      row.dataset.prop = prop;
      const values = new Set(elements.map((e) => e.geometry[prop as GeometryProp]));
      const value = values.size === 1 ? String([...values][0]) : 'mixed';
      const label = document.createElement('span');
      label.textContent = `${prop}: ${value}`;
      row.appendChild(label);
      const copy = document.createElement('button');
      copy.className = `copy-prop copy-${prop}`;
      copy.textContent = `copy ${prop}`;
      copy.title = "set this property from each element's matched partner";
      copy.addEventListener('click', () => {
        void this.store.dispatch({ type: 'property-copy', ids, properties: [prop] });
      });
      row.appendChild(copy);
      box.appendChild(row);
    }
    return box;
  }
}
