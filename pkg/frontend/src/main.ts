import { App } from './app.js';
import { GatewayClient } from './api.js';
import { SessionStore } from './state.js';

const DEFAULT_GATEWAY = 'http://127.0.0.1:7342';

function boot(): void {
  const form = document.querySelector<HTMLFormElement>('#loader')!;
  const appRoot = document.querySelector<HTMLElement>('#app')!;
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const gateway =
      form.querySelector<HTMLInputElement>('[name=gateway]')!.value || DEFAULT_GATEWAY;
    const a = form.querySelector<HTMLInputElement>('[name=a]')!.files?.[0];
    const b = form.querySelector<HTMLInputElement>('[name=b]')!.files?.[0];
    if (!a || !b) return;
    const client = new GatewayClient(gateway);
    const store = new SessionStore(client);
    void client
      .createSession(a, b)
      .then((session) => {
        form.hidden = true;
        new App(appRoot, store).mount();
        return store.adopt(session);
      })
      .catch((error) => {
        const box = document.querySelector<HTMLElement>('#load-error')!;
        box.hidden = false;
        box.textContent = String(error);
      });
  });
}

boot();
