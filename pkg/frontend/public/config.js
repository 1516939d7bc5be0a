// Runtime configuration: set the API origin when the UI is not served by
// the API server itself.  Empty string = same origin.
window.METALAKE_API_BASE = "";
