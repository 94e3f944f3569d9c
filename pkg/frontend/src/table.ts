// Interactive data table: show/hide columns, page size, checkbox selection,
// row-click detail. Rendering only; every mutation goes back through callers.

export interface TableOptions {
  columns: string[];
  hiddenColumns?: string[];
  rows: Record<string, unknown>[];
  total: number;
  page: number;
  pageSize: number;
  selectable?: boolean;
  onRowClick?: (id: string) => void;
  onToggleColumn?: (column: string) => void;
  onPageChange?: (page: number) => void;
  onPageSizeChange?: (size: number) => void;
}

export const EMPTY_SELECTION_MESSAGE =
  'Please select assets to delete and press "Delete Selected" button';

export function visibleColumns(options: TableOptions): string[] {
  const hidden = new Set(options.hiddenColumns ?? []);
  return options.columns.filter((c) => !hidden.has(c));
}

export function renderTable(container: HTMLElement, options: TableOptions): void {
  container.innerHTML = "";
  const controls = document.createElement("div");
  controls.className = "table-controls";
  for (const column of options.columns) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = !(options.hiddenColumns ?? []).includes(column);
    box.dataset.column = column;
    box.addEventListener("change", () => options.onToggleColumn?.(column));
    label.append(box, document.createTextNode(column));
    controls.appendChild(label);
  }
  const sizeSelect = document.createElement("select");
  sizeSelect.className = "page-size";
  for (const size of [10, 20, 50, 100]) {
    const opt = document.createElement("option");
    opt.value = String(size);
    opt.textContent = `${size} lines`;
    opt.selected = size === options.pageSize;
    sizeSelect.appendChild(opt);
  }
  sizeSelect.addEventListener("change", () =>
    options.onPageSizeChange?.(Number(sizeSelect.value)));
  controls.appendChild(sizeSelect);
  container.appendChild(controls);

  const table = document.createElement("table");
  table.className = "data-table";
  const thead = document.createElement("thead");
  const head = document.createElement("tr");
  thead.appendChild(head);
  table.appendChild(thead);
  if (options.selectable) head.appendChild(document.createElement("th"));
  for (const column of visibleColumns(options)) {
    const th = document.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  const body = document.createElement("tbody");
  table.appendChild(body);
  for (const row of options.rows) {
    const tr = document.createElement("tr");
    tr.dataset.id = String(row.id ?? "");
    if (options.selectable) {
      const cell = document.createElement("td");
      tr.appendChild(cell);
      const box = document.createElement("input");
      box.type = "checkbox";
      box.className = "row-select";
      box.dataset.id = String(row.id ?? "");
      box.addEventListener("click", (event) => event.stopPropagation());
      cell.appendChild(box);
    }
    for (const column of visibleColumns(options)) {
      const cell = document.createElement("td");
      const value = row[column];
      cell.textContent = value === null || value === undefined ? "" : String(value);
      tr.appendChild(cell);
    }
    tr.addEventListener("click", () => options.onRowClick?.(tr.dataset.id ?? ""));
    body.appendChild(tr);
  }
  container.appendChild(table);

  const pager = document.createElement("div");
  pager.className = "pager";
  const pages = Math.max(1, Math.ceil(options.total / options.pageSize));
  const prev = document.createElement("button");
  prev.textContent = "<";
  prev.disabled = options.page <= 1;
  prev.addEventListener("click", () => options.onPageChange?.(options.page - 1));
  const next = document.createElement("button");
  next.textContent = ">";
  next.disabled = options.page >= pages;
  next.addEventListener("click", () => options.onPageChange?.(options.page + 1));
  const label = document.createElement("span");
  label.textContent = `page ${options.page} of ${pages} (${options.total} records)`;
  pager.append(prev, label, next);
  container.appendChild(pager);
}

export function selectedIds(container: HTMLElement): string[] {
  return Array.from(
    container.querySelectorAll<HTMLInputElement>("input.row-select:checked"),
  ).map((box) => box.dataset.id ?? "");
}
