import { describe, expect, it } from 'vitest';

import { GatewayClient, GatewayError } from '../src/api.js';
import { FakeGateway } from './helpers.js';

describe('GatewayClient', () => {
  it('fetches session state', async () => {
    const gateway = new FakeGateway();
    const client = new GatewayClient('', gateway.fetch);
    const state = await client.getSession('sess');
    expect(state.id).toBe('sess');
    expect(state.aStar.elements).toHaveLength(3);
  });

  it('passes selection and canvas to the rules endpoint', async () => {
    const gateway = new FakeGateway();
    const client = new GatewayClient('', gateway.fetch);
    const rules = await client.getRules('sess', ['a1', 'a2']);
    expect(rules.rules.length).toBeGreaterThan(0);
    expect(gateway.requests.at(-1)).toContain('selection=a1%2Ca2');
    expect(gateway.requests.at(-1)).toContain('canvas=output');
  });

  it('posts commands as JSON', async () => {
    const gateway = new FakeGateway();
    const client = new GatewayClient('', gateway.fetch);
    const response = await client.sendCommand('sess', {
      type: 'set-geometry',
      id: 'a1',
      geometry: { x: 0, y: 0, z: 0, w: 20, h: 20 },
    });
    expect(response.changed).toEqual(['a1']);
    expect(gateway.commands[0]?.type).toBe('set-geometry');
  });

  it('raises GatewayError with the server error code', async () => {
    const gateway = new FakeGateway();
    gateway.failNextCommand = { status: 409, error: 'LockedPropertyViolation', detail: 'a1: x is locked' };
    const client = new GatewayClient('', gateway.fetch);
    await expect(client.sendCommand('sess', { type: 'global-copy' })).rejects.toMatchObject({
      status: 409,
      code: 'LockedPropertyViolation',
    });
    await expect(
      client.sendCommand('ghost', { type: 'global-copy' }),
    ).rejects.toBeInstanceOf(GatewayError);
  });
});
