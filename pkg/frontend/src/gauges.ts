/** Per-trait comfort gauges: signed bar plus a threshold marker. */

import { TRAIT_COLORS } from './chart.js';

const TRAIT_NAMES: Record<string, string> = {
  C: 'Conscientiousness',
  E: 'Extroversion',
  A: 'Agreeableness',
};

export function renderGauges(container: HTMLElement, comfort: Record<string, number>,
                             thresholds: Record<string, number>): void {
  container.replaceChildren();
  for (const [letter, value] of Object.entries(comfort)) {
    const row = document.createElement('div');
    row.className = 'gauge';
    row.dataset.trait = letter;

    const label = document.createElement('span');
    label.className = 'gauge-label';
    label.textContent = `${TRAIT_NAMES[letter] ?? letter} ${value >= 0 ? '+' : ''}${value.toFixed(2)}`;

    const track = document.createElement('div');
    track.className = 'gauge-track';
    const bar = document.createElement('div');
    bar.className = 'gauge-bar';
    const magnitude = Math.min(1, Math.abs(value));
    bar.style.width = `${magnitude * 100}%`;
    bar.style.background = TRAIT_COLORS[letter] ?? '#777';
    const th = Math.abs(thresholds[letter] ?? 0);
    const marker = document.createElement('div');
    marker.className = 'gauge-threshold';
    marker.style.left = `${th * 100}%`;
    if (magnitude < th) row.classList.add('below-threshold');

    track.appendChild(bar);
    track.appendChild(marker);
    row.appendChild(label);
    row.appendChild(track);
    container.appendChild(row);
  }
}
