/** Latest-wins render scheduling.
 *
 * At most one request is in flight; while it runs, newer requests
 * overwrite a single pending slot, so a rapid drag issues at most one
 * request per event and the displayed frame always corresponds to the
 * most recent state once the network quiesces. Responses carry sequence
 * numbers and stale ones are dropped (belt and suspenders: with one
 * request in flight they cannot interleave, but a misbehaving transport
 * must not repaint backwards).
 */

export type RenderFn<T> = (query: Record<string, string>) => Promise<T>;
export type DisplayFn<T> = (result: T) => void;
export type ErrorFn = (err: unknown) => void;

export class LatestWins<T> {
  private inflight = false;
  private pending: Record<string, string> | null = null;
  private seq = 0;
  private displayedSeq = 0;
  requestsIssued = 0;

  constructor(
    private renderFn: RenderFn<T>,
    private display: DisplayFn<T>,
    private onError: ErrorFn = () => undefined,
  ) {}

  request(query: Record<string, string>): void {
    if (this.inflight) {
      this.pending = query; // silently supersede whatever was queued
      return;
    }
    void this.launch(query);
  }

  get busy(): boolean {
    return this.inflight;
  }

  private async launch(query: Record<string, string>): Promise<void> {
    this.inflight = true;
    const seq = ++this.seq;
    this.requestsIssued += 1;
    try {
      const result = await this.renderFn(query);
      if (seq > this.displayedSeq) {
        this.displayedSeq = seq;
        this.display(result);
      }
    } catch (err) {
      this.onError(err);
    } finally {
      this.inflight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.launch(next);
      }
    }
  }
}
