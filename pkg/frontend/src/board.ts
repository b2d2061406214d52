/** 3x3 board rendering and click-to-place.
 *
 * Server authority: a click only posts the move; the block appears when the
 * acknowledging event updates the folded view. A pending highlight marks the
 * optimistic click and is reverted on rejection. */

export interface BoardCallbacks {
  onPlace: (row: number, col: number) => Promise<void>;
}

export function createBoard(container: HTMLElement, callbacks: BoardCallbacks): void {
  container.classList.add('board');
  for (let row = 0; row < 3; row++) {
    for (let col = 0; col < 3; col++) {
      const cell = document.createElement('button');
      cell.className = 'cell empty';
      cell.dataset.row = String(row);
      cell.dataset.col = String(col);
      cell.addEventListener('click', async () => {
        if (!container.classList.contains('your-turn') || !cell.classList.contains('empty')) {
          return;
        }
        cell.classList.add('pending');
        try {
          await callbacks.onPlace(row, col);
        } catch (err) {
          cell.classList.remove('pending');
          cell.classList.add('shake');
          setTimeout(() => cell.classList.remove('shake'), 400);
          throw err;
        }
      });
      container.appendChild(cell);
    }
  }
}

export function renderBoard(container: HTMLElement, board: string, yourTurn: boolean): void {
  container.classList.toggle('your-turn', yourTurn);
  const cells = container.querySelectorAll<HTMLElement>('.cell');
  cells.forEach((cell) => {
    const row = Number(cell.dataset.row);
    const col = Number(cell.dataset.col);
    const ch = board[row * 3 + col];
    cell.classList.toggle('red', ch === 'R');
    cell.classList.toggle('blue', ch === 'B');
    cell.classList.toggle('empty', ch === '.');
    if (ch !== '.') cell.classList.remove('pending');
  });
}
