# macsim - world subpackage (layouts and schedules)
