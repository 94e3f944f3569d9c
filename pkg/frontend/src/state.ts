// Per-user view preferences: column visibility and page size persist locally,
// keyed by person id. Nothing here is authoritative; the server decides what
// a session may actually see or do.

export interface TablePrefs {
  hiddenColumns: string[];
  pageSize: number;
}

export class ViewState {
  token: string | null = null;
  personId: string | null = null;
  activeRoleId: string | null = null;
  page = "login";
  private store: Storage;

  constructor(store: Storage = globalThis.localStorage) {
    this.store = store;
  }

  private prefsKey(kind: string): string {
    return `uuis:${this.personId ?? "anon"}:table:${kind}`;
  }

  tablePrefs(kind: string): TablePrefs {
    const raw = this.store.getItem(this.prefsKey(kind));
    if (raw) {
      try {
        return JSON.parse(raw) as TablePrefs;
      } catch {
        // fall through to defaults on corrupted prefs
      }
    }
    return { hiddenColumns: [], pageSize: 20 };
  }

  saveTablePrefs(kind: string, prefs: TablePrefs): void {
    this.store.setItem(this.prefsKey(kind), JSON.stringify(prefs));
  }

  toggleColumn(kind: string, column: string): TablePrefs {
    const prefs = this.tablePrefs(kind);
    const index = prefs.hiddenColumns.indexOf(column);
    if (index >= 0) prefs.hiddenColumns.splice(index, 1);
    else prefs.hiddenColumns.push(column);
    this.saveTablePrefs(kind, prefs);
    return prefs;
  }

  setPageSize(kind: string, size: number): TablePrefs {
    const prefs = this.tablePrefs(kind);
    prefs.pageSize = size;
    this.saveTablePrefs(kind, prefs);
    return prefs;
  }
}
