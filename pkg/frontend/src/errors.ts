/** Bad key, bad value, or unknown key in a plot spec file. */
export class SpecError extends Error {}

/** Missing/empty/unparseable CSV input. */
export class InputError extends Error {}
