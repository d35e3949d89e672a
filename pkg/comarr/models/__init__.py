# comarr Models Package
